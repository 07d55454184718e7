"""Monotonic boundary-layer profiles ``U_s(y)`` and their critical points."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq
from scipy.special import erfcx


class ProfileError(RuntimeError):
    pass


class ShearProfile:
    """Base class: a profile with ``U_s(0) = 0`` tending to ``u_plus``.

    Subclasses implement :meth:`derivatives`, returning ``U_s^{(k)}(y)`` for
    ``k = 0..n`` at real or complex points ``y``.
    """

    kind: str = "generic"
    u_plus: float = 1.0

    def derivatives(self, y, n: int) -> list[np.ndarray]:
        raise NotImplementedError

    def value(self, y, deriv: int = 0):
        out = self.derivatives(np.asarray(y), deriv)[deriv]
        return out[()] if np.ndim(y) == 0 else out

    def __call__(self, y):
        return self.value(y)

    def taylor(self, y0: complex, n_max: int) -> np.ndarray:
        """Derivatives ``U_s^{(n)}(y0)``, ``n = 0..n_max`` (complex array)."""
        d = self.derivatives(np.asarray(complex(y0)), n_max)
        return np.array([complex(v) for v in d])

    @property
    def slope0(self) -> float:
        return float(np.real(self.value(0.0, 1)))

    def label(self) -> str:
        return self.kind


@dataclass(frozen=True)
class ExponentialProfile(ShearProfile):
    """``U_s(y) = 1 - exp(-delta y)``."""

    delta: float = 1.0
    kind: str = field(default="exp", init=False)
    u_plus: float = field(default=1.0, init=False)

    def derivatives(self, y, n):
        y = np.asarray(y)
        e = np.exp(-self.delta * y)
        out = [-np.expm1(-self.delta * y)]
        for k in range(1, n + 1):
            out.append(-((-self.delta) ** k) * e)
        return out

    def label(self):
        return f"exp(delta={self.delta:g})"


def make_exponential(delta: float = 1.0) -> ExponentialProfile:
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta!r}")
    return ExponentialProfile(delta=float(delta))


# --------------------------------------------------------------------------
# Blasius: 2 f''' + f f'' = 0, f(0) = f'(0) = 0, f'(inf) = 1, U_s = f'.


def blasius_taylor(f0, f1, f2, n: int) -> list:
    """Normalised Taylor coefficients ``F_k = f^{(k)}/k!``, ``k = 0..n``.

    Works elementwise on arrays; uses ``(k+3)(k+2)(k+1) F_{k+3} =
    -1/2 sum_j F_j (k-j+2)(k-j+1) F_{k-j+2}``.
    """
    F = [f0, f1, f2 / 2.0]
    for k in range(0, n - 2):
        acc = 0.0
        for j in range(k + 1):
            acc = acc + F[j] * (k - j + 2) * (k - j + 1) * F[k - j + 2]
        F.append(-0.5 * acc / ((k + 3) * (k + 2) * (k + 1)))
    return F[: n + 1]


def _blasius_rhs(_, s):
    return [s[1], s[2], -0.5 * s[0] * s[2]]


@dataclass(frozen=True, eq=False)
class BlasiusProfile(ShearProfile):
    """Blasius profile, ``U_s = f'`` with ``2 f''' + f f'' = 0``."""

    wall_curvature: float = 0.0
    y_max: float = 25.0
    solution: object = None
    kind: str = field(default="blasius", init=False)
    u_plus: float = field(default=1.0, init=False)
    taylor_order: int = 12
    near_wall_radius: float = 1.0
    near_wall_order: int = 60
    tail_start: float = 10.0

    def _real_state(self, x):
        x = np.asarray(x, dtype=float)
        xc = np.clip(x, 0.0, self.tail_start)
        s = self.solution.sol(xc.ravel())
        f, fp, fpp = (v.reshape(x.shape) for v in s)
        beyond = x > self.tail_start
        if np.any(beyond):
            # Far field: f = a + s up to f'(tail) - 1 ~ 1e-9, so the Blasius
            # equation gives a Gaussian f'' and an erfc for f'.  The ODE solution
            # loses f'' once it drops below the solver's absolute tolerance.
            a, f1, f2 = (float(v) for v in self.solution.sol(self.tail_start))
            sd = np.where(beyond, x - self.tail_start, 0.0)
            u0, u = a / 2, (sd + a) / 2
            gauss = f2 * np.exp(u0 * u0 - u * u)
            tail = f2 * math.sqrt(math.pi) * (erfcx(u0) - erfcx(u) * np.exp(u0 * u0 - u * u))
            f = np.where(beyond, a + sd, f)
            fp = np.where(beyond, f1 + tail, fp)
            fpp = np.where(beyond, gauss, fpp)
        return f, fp, fpp

    def _near_wall(self, y, n):
        # Taylor series about the wall: exact relative accuracy for tiny y.
        F = blasius_taylor(0.0, 0.0, self.wall_curvature, self.near_wall_order + n + 1)
        out = []
        for k in range(n + 1):
            acc = 0.0
            for j in range(len(F) - 1, k, -1):
                acc = acc * y + F[j] * math.perm(j, k + 1)
            out.append(acc)
        return out

    def derivatives(self, y, n):
        y = np.asarray(y)
        near = np.abs(y) <= self.near_wall_radius
        if np.all(near):
            return self._near_wall(y, n)
        out = self._generic(y, n)
        if np.any(near):
            w = self._near_wall(y, n)
            out = [np.where(near, a, b) for a, b in zip(w, out)]
        return out

    def _generic(self, y, n):
        y = np.asarray(y)
        x = np.real(y)
        f, fp, fpp = self._real_state(x)
        if np.iscomplexobj(y) and np.any(np.imag(y) != 0):
            dy = 1j * np.imag(y)
            F = blasius_taylor(f, fp, fpp, self.taylor_order)
            # Re-centre at the complex point: f^{(j)}(x + dy) from the series about x.
            state = []
            for j in range(3):
                acc = 0.0
                for k in range(j, len(F)):
                    acc = acc + F[k] * math.perm(k, j) * dy ** (k - j)
                state.append(acc)
            f, fp, fpp = state
        F = blasius_taylor(f, fp, fpp, n + 1)
        return [F[k + 1] * math.factorial(k + 1) for k in range(n + 1)]


def _shoot(kappa: float, y_max: float, tol: float):
    return solve_ivp(
        _blasius_rhs,
        (0.0, y_max),
        [0.0, 0.0, kappa],
        method="DOP853",
        rtol=tol,
        atol=tol * 1e-2,
        dense_output=True,
    )


def make_blasius(tol: float = 1e-12, y_max: float = 25.0) -> BlasiusProfile:
    """Solve the Blasius equation by shooting on ``f''(0)``."""
    if not 0 < tol <= 1e-4:
        raise ValueError("tol must lie in (0, 1e-4]")
    lo, hi = 0.2, 0.5

    def miss(kappa):
        return _shoot(kappa, y_max, tol).y[1, -1] - 1.0

    m_lo, m_hi = miss(lo), miss(hi)
    if m_lo * m_hi > 0:
        raise ProfileError(f"shooting bracket [{lo}, {hi}] does not straddle f'(inf)=1: misses {m_lo}, {m_hi}")
    kappa = brentq(miss, lo, hi, xtol=1e-15, rtol=1e-15)
    sol = _shoot(kappa, y_max, tol)
    return BlasiusProfile(wall_curvature=kappa, y_max=y_max, solution=sol)


# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CriticalPoint:
    y_c: complex
    c_eff: complex


def find_critical_point(profile: ShearProfile, c_eff: complex, tol: float = 1e-12, max_iter: int = 60) -> CriticalPoint:
    """Solve ``U_s(y_c) = c_eff`` by Newton iteration from ``c_eff / U_s'(0)``."""
    c_eff = complex(c_eff)
    if abs(c_eff) >= 0.5 * profile.u_plus:
        raise ProfileError(f"|c_eff| = {abs(c_eff):.3g} too large for a near-wall critical point")
    y = c_eff / profile.slope0
    for _ in range(max_iter):
        u, du = profile.derivatives(np.asarray(y), 1)
        r = complex(u) - c_eff
        if abs(r) <= tol * max(abs(c_eff), 1e-300) or abs(r) == 0.0:
            return CriticalPoint(y, c_eff)
        y = y - r / complex(du)
    u = complex(profile.value(y))
    if abs(u - c_eff) <= tol * max(abs(c_eff), 1e-300) * 10:
        return CriticalPoint(y, c_eff)
    raise ProfileError(f"critical point Newton iteration did not converge; last iterate {y!r}")
