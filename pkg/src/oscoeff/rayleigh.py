"""Rayleigh operator: homogeneous solutions and inversion.

``Ray_alpha psi = (U - c~) psi'' - (U'' + alpha^2 (U - c~)) psi`` with
``c~ = c - eps alpha^2`` and ``eps = nu / (i alpha)``.  Near the critical point
solutions are log-power series about ``y_c``; on ``[sigma, Y0]`` the equation is
regular and integrated numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .funcrep import NLOG, NMIN, Geometry, GridRep, MultiScaleFunction, RepresentationError, SeriesRep, Tail, fd_derivative
from .profiles import ShearProfile, find_critical_point


class DegenerateProfileError(ValueError):
    pass


def default_geometry(y_c, alpha, nu, sigma=0.1, h=1e-3, y0=None, theta=30.0, hc_divisor=2000, n_series=30):
    """Zone sizes for a mode with wavenumber ``alpha`` at viscosity ``nu``."""
    if y0 is None:
        y0 = min(12.0 / alpha, 40.0) if alpha > 0 else 40.0
    return Geometry(complex(y_c), sigma, h, float(y0), theta * nu**0.25, int(hc_divisor), int(n_series))


@dataclass(frozen=True, eq=False)
class RayleighContext:
    profile: ShearProfile
    c: complex
    alpha: float
    nu: float
    geom: Geometry

    def __post_init__(self):
        t = self.t
        if abs(t[1]) < 1e-12:
            raise DegenerateProfileError("U'(y_c) vanishes; series recurrence pivot is singular")
        if abs(t[0]) > 1e-9 * abs(self.c_eff) + 1e-300:
            raise ValueError(f"y_c is not a critical point: U(y_c) - c~ = {t[0]!r}")

    @property
    def eps(self) -> complex:
        return self.nu / (1j * self.alpha) if self.alpha > 0 else 0j

    @property
    def c_eff(self) -> complex:
        return self.c - self.eps * self.alpha**2

    @property
    def y_c(self) -> complex:
        return self.geom.y_c

    @cached_property
    def derivs(self) -> np.ndarray:
        """``U^{(n)}(y_c)`` for ``n = 0..N+2``."""
        return self.profile.taylor(self.y_c, self.geom.n_series + 2)

    @cached_property
    def t(self) -> np.ndarray:
        """Normalized Taylor coefficients of ``U - c~`` about ``y_c``."""
        d = self.derivs
        t = np.array([d[m] / math.factorial(m) for m in range(len(d))], complex)
        t[0] = d[0] - self.c_eff
        return t

    @cached_property
    def v(self) -> np.ndarray:
        """Normalized Taylor coefficients of ``U'' + alpha^2 (U - c~)``."""
        d = self.derivs
        n = len(d) - 2
        v = np.array([d[m + 2] / math.factorial(m) for m in range(n)], complex)
        tt = self.t[:n].copy()
        tt[0] = 0.0
        return v + self.alpha**2 * tt

    # -- series factors -------------------------------------------------
    def series_of(self, coeffs) -> SeriesRep:
        return SeriesRep.from_taylor(self.y_c, self.geom.sigma, coeffs, self.geom.n_series)

    @cached_property
    def u_tilde_series(self) -> SeriesRep:
        t = self.t.copy()
        t[0] = 0.0
        return self.series_of(t)

    @cached_property
    def exp_series(self) -> SeriesRep:
        """``exp(-alpha y)`` about ``y_c``."""
        n = self.geom.n_series
        a = self.alpha
        co = [np.exp(-a * self.y_c) * (-a) ** m / math.factorial(m) for m in range(n + 1)]
        return self.series_of(co)

    # -- outer-grid factors ---------------------------------------------
    @cached_property
    def outer_profile(self):
        return self.profile.derivatives(self.geom.outer_nodes, 2)

    @cached_property
    def u_tilde_outer(self) -> np.ndarray:
        return self.outer_profile[0] - self.c_eff

    @cached_property
    def v_outer(self) -> np.ndarray:
        return self.outer_profile[2] + self.alpha**2 * self.u_tilde_outer

    def for_wavenumber(self, alpha: float) -> RayleighContext:
        """Context at another wavenumber sharing ``c`` and the critical point."""
        return RayleighContext(self.profile, self.c, alpha, self.nu, self.geom)


def make_context(profile: ShearProfile, c: complex, alpha: float, nu: float, **numerics) -> RayleighContext:
    eps = nu / (1j * alpha) if alpha > 0 else 0j
    cp = find_critical_point(profile, c - eps * alpha**2)
    geom = default_geometry(cp.y_c, alpha, nu, **numerics)
    return RayleighContext(profile, complex(c), float(alpha), float(nu), geom)


# --------------------------------------------------------------------------
# Series zone


def apply_ray_series(ctx: RayleighContext, psi: SeriesRep) -> SeriesRep:
    """``Ray_alpha`` applied term-wise to a series."""
    d2 = psi.differentiate().differentiate()
    return ctx.u_tilde_series.multiply(d2, floor=NMIN) - ctx.series_of(ctx.v).multiply(psi, floor=NMIN)


def solve_series(t, v, src: SeriesRep, a0=0.0, a1=0.0, tol=1e-10) -> SeriesRep:
    """Particular series solution of ``(sum t_m Y^m) psi'' - (sum v_m Y^m) psi = src``.

    Coefficients are matched by ascending power and, within a power, by
    descending log order.  ``t[0]`` is ignored.  The two free coefficients
    (``Y^0`` and ``Y^1``) are set to ``a0`` and ``a1``.
    """
    n_max = src.n_max
    t = np.asarray(t, complex)
    v = np.asarray(v, complex)
    t1 = t[1]
    P = np.zeros((NLOG, n_max + 1 - NMIN), complex)
    scale = max(np.max(np.abs(src.coef)), abs(a0), abs(a1), 1e-300)

    def tcoef(m):
        return t[m] if 1 <= m < len(t) else 0.0

    def vcoef(m):
        return v[m] if 0 <= m < len(v) else 0.0

    for p in range(NMIN, n_max):
        R = np.array([src.get(p, j) for j in range(NLOG)], complex)
        for n in range(NMIN, p + 1):
            col = P[:, n - NMIN]
            if not np.any(col):
                continue
            tm = tcoef(p - n + 2)
            vm = vcoef(p - n)
            for k in range(NLOG):
                c = col[k]
                if c == 0:
                    continue
                R[k] -= (tm * n * (n - 1) - vm) * c
                if k >= 1:
                    R[k - 1] -= tm * k * (2 * n - 1) * c
                if k >= 2:
                    R[k - 2] -= tm * k * (k - 1) * c
        q = (p + 1) * p
        s = np.zeros(NLOG + 2, complex)
        if q != 0:
            for j in range(NLOG - 1, -1, -1):
                s[j] = (R[j] / t1 - (j + 1) * (2 * p + 1) * s[j + 1] - (j + 2) * (j + 1) * s[j + 2]) / q
        else:
            if abs(R[2]) > tol * scale:
                raise RepresentationError(f"source needs a log^3 Y response at power {p + 1}")
            s[2] = R[1] / (t1 * 2 * (2 * p + 1))
            s[1] = (R[0] / t1 - 2 * s[2]) / (2 * p + 1)
            s[0] = a0 if p == -1 else a1
        P[:, p + 1 - NMIN] = s[:NLOG]
    return SeriesRep(src.center, src.sigma, P)


def frobenius_recurrence(cd, alpha, e, d, a0, a1, n_terms):
    """Log-family and regular-family recurrences in derivative form.

    ``cd[n] = U^{(n)}(y_c)`` (``n >= 1``), source ``sum e_n Y^n + sum d_n Y^n log Y``.
    Returns ``(a, b)`` with ``psi = sum a_n Y^n + log Y sum b_n Y^n``.
    """
    f = math.factorial
    a = np.zeros(n_terms + 1, complex)
    b = np.zeros(n_terms + 1, complex)
    a[0], a[1] = a0, a1

    def E(i):
        return e[i] if 0 <= i < len(e) else 0.0

    def D(i):
        return d[i] if 0 <= i < len(d) else 0.0

    def C(i):
        return cd[i] if i < len(cd) else 0.0

    al2 = alpha**2
    b[1] = (C(2) * a[0] + E(0)) / C(1)
    for n in range(3, n_terms + 2):
        # log-family: determines b_{n-1}
        rhs = sum(b[n - 2 - p] * C(p + 2) / f(p) for p in range(0, n - 2))
        rhs += sum(al2 * C(p) * b[n - 2 - p] / f(p) for p in range(1, n - 2))
        rhs += D(n - 2)
        rhs -= sum((n - p) * (n - p - 1) * C(p) * b[n - p] / f(p) for p in range(2, n - 1))
        if n - 1 <= n_terms:
            b[n - 1] = rhs / ((n - 1) * (n - 2) * C(1))
        # regular family: determines a_{n-1}
        lhs = sum(C(p) * (2 * n - 2 * p - 1) * b[n - p] / f(p) for p in range(1, n) if n - p <= n_terms)
        lhs += sum(C(n - 2 - p) * (p + 2) * (p + 1) * a[p + 2] / f(n - 2 - p) for p in range(0, n - 3))
        rhs = sum(a[n - 2 - p] * C(p + 2) / f(p) for p in range(0, n - 1))
        rhs += sum(al2 * C(p) * a[n - 2 - p] / f(p) for p in range(1, n - 1))
        rhs += E(n - 2)
        if n - 1 <= n_terms:
            a[n - 1] = (rhs - lhs) / ((n - 1) * (n - 2) * C(1))
    return a, b


# --------------------------------------------------------------------------
# Outer zone


def integrate_outer(ctx: RayleighContext, rhs: np.ndarray, start: tuple, rhs_before: complex = 0.0,
                   scheme: str = "numerov") -> np.ndarray:
    """Integrate ``Ray_alpha psi = rhs`` on the outer grid.

    ``start`` is ``(psi(sigma - h), psi(sigma), psi'(sigma))`` and ``rhs_before``
    the source at ``sigma - h``.  Numerov uses the two values; Euler uses the
    value and slope at ``sigma``.
    """
    g = ctx.geom
    h = g.h
    ut = ctx.u_tilde_outer
    q = ctx.v_outer / ut
    r = np.asarray(rhs, complex) / ut
    n = len(ut)
    out = np.empty(n, complex)
    if scheme == "numerov":
        yb = g.sigma - h
        ub = ctx.profile.derivatives(np.array([yb]), 2)
        utb = complex(ub[0][0]) - ctx.c_eff
        qb = (complex(ub[2][0]) + ctx.alpha**2 * utb) / utb
        rb = complex(rhs_before) / utb
        k = h * h / 12.0
        qe = np.concatenate([[qb], q])
        re_ = np.concatenate([[rb], r])
        # Summed form in w = (1 - k q) psi: D_n = w_{n+1} - w_n accumulates
        # increments, so round-off scales with the slope rather than with psi.
        a = (1.0 - k * qe).tolist()
        g12 = (12.0 * k * qe).tolist()
        s = (k * (re_[:-2] + 10.0 * re_[1:-1] + re_[2:])).tolist()
        w_prev, w_cur = a[0] * complex(start[0]), a[1] * complex(start[1])
        diff = w_cur - w_prev
        out[0] = complex(start[1])
        # extended index j = i + 1
        for i in range(n - 1):
            diff += g12[i + 1] * (w_cur / a[i + 1]) + s[i]
            w_cur = w_cur + diff
            out[i + 1] = w_cur / a[i + 2]
        return out
    if scheme == "euler":
        psi, dpsi = complex(start[1]), complex(start[2])
        qs, rs = q.tolist(), r.tolist()
        for i in range(n):
            out[i] = psi
            psi, dpsi = psi + h * dpsi, dpsi + h * (qs[i] * psi + rs[i])
        return out
    raise ValueError(f"unknown scheme {scheme!r}")


def _slow_from_series(ctx: RayleighContext, series: SeriesRep, outer_rhs, scheme="numerov", tail=None,
                      src_series=None) -> MultiScaleFunction:
    g = ctx.geom
    s0 = g.sigma
    start = (series.evaluate(s0 - g.h), series.evaluate(s0), series.evaluate(s0, 1))
    if outer_rhs is None:
        outer_rhs = np.zeros(len(g.outer_nodes), complex)
    rb = 0.0 if src_series is None else src_series.evaluate(s0 - g.h)
    vals = integrate_outer(ctx, outer_rhs, start, rb, scheme)
    d2 = (ctx.v_outer * vals + outer_rhs) / ctx.u_tilde_outer
    d1 = fd_derivative(vals, g.h)
    if tail is None:
        tail = Tail("slow", ctx.alpha)
    return MultiScaleFunction(g, series, GridRep(g.outer_nodes, vals, (d1, d2)), None, tail)


def invert_ray(ctx: RayleighContext, phi: MultiScaleFunction, a0=0.0, a1=0.0, scheme="numerov") -> MultiScaleFunction:
    """Particular solution of ``Ray_alpha psi = phi`` (slow source only)."""
    g = ctx.geom
    if phi.inner is not None and np.any(phi.inner.values != 0):
        raise ValueError("Rayleigh inversion takes a slow source; the critical-layer part is handled separately")
    src = phi.series if phi.series is not None else SeriesRep.zeros(g.y_c, g.sigma, g.n_series)
    series = solve_series(ctx.t, ctx.v, src, a0, a1)
    rhs = phi.outer.values if phi.outer is not None else None
    return _slow_from_series(ctx, series, rhs, scheme, src_series=src)


def invert_ray0(ctx: RayleighContext, phi: MultiScaleFunction, **kw) -> MultiScaleFunction:
    if ctx.alpha != 0:
        raise ValueError("invert_ray0 needs an alpha = 0 context")
    return invert_ray(ctx, phi, **kw)


def invert_ray_alpha(ctx: RayleighContext, phi: MultiScaleFunction, **kw) -> MultiScaleFunction:
    return invert_ray(ctx, phi, **kw)


def apply_ray(ctx: RayleighContext, psi: MultiScaleFunction) -> MultiScaleFunction:
    """``Ray_alpha psi`` on the slow zones (series analytically, grid by differences)."""
    g = ctx.geom
    series = None if psi.series is None else apply_ray_series(ctx, psi.series)
    outer = None
    if psi.outer is not None:
        d2 = psi.outer.differentiate().differentiate().values
        outer = GridRep(g.outer_nodes, ctx.u_tilde_outer * d2 - ctx.v_outer * psi.outer.values)
    return MultiScaleFunction(g, series, outer, None, psi.tail)


# --------------------------------------------------------------------------
# Homogeneous solutions


def psi_minus_0(ctx: RayleighContext) -> MultiScaleFunction:
    """``U - c``."""
    g = ctx.geom
    co = ctx.t.copy()
    co[0] = ctx.derivs[0] - ctx.c
    series = ctx.series_of(co)
    u, du, d2u = ctx.outer_profile
    return MultiScaleFunction(g, series, GridRep(g.outer_nodes, u - ctx.c + 0j, (du + 0j, d2u + 0j)), None,
                              Tail("slow", 0.0))


def psi_plus(ctx: RayleighContext, scheme="numerov") -> MultiScaleFunction:
    """Second Rayleigh solution, ``a_0 = 1``, ``a_1 = 0``, log singularity at ``y_c``."""
    zero = SeriesRep.zeros(ctx.y_c, ctx.geom.sigma, ctx.geom.n_series)
    series = solve_series(ctx.t, ctx.v, zero, 1.0, 0.0)
    return _slow_from_series(ctx, series, None, scheme, Tail("slow", 0.0))


def psi_plus_0(ctx: RayleighContext, scheme="numerov") -> MultiScaleFunction:
    if ctx.alpha != 0:
        raise ValueError("psi_plus_0 needs an alpha = 0 context")
    return psi_plus(ctx, scheme)


def psi_plus_0_recurrence(ctx: RayleighContext) -> SeriesRep:
    """Series of ``psi_{+,0}`` from the explicit log/regular recurrences."""
    n = ctx.geom.n_series
    a, b = frobenius_recurrence(ctx.derivs, 0.0, [], [], 1.0, 0.0, n)
    s = SeriesRep.zeros(ctx.y_c, ctx.geom.sigma, n)
    s.coef[0, -NMIN:] = a
    s.coef[1, -NMIN:] = b
    return s


def asymptotic_slow(ctx: RayleighContext) -> MultiScaleFunction:
    """``(U - c~) exp(-alpha y)``."""
    g = ctx.geom
    series = ctx.u_tilde_series.multiply(ctx.exp_series)
    a = ctx.alpha
    u, du, d2u = ctx.outer_profile
    ex = np.exp(-a * g.outer_nodes)
    ut = ctx.u_tilde_outer
    vals = ut * ex
    d1 = (du - a * ut) * ex
    d2 = (d2u - 2 * a * du + a * a * ut) * ex
    return MultiScaleFunction(g, series, GridRep(g.outer_nodes, vals, (d1, d2)), None, Tail("slow", a))


def repair_far_field(psi: MultiScaleFunction, plus: MultiScaleFunction) -> tuple[MultiScaleFunction, complex]:
    """Remove the growing ``psi_+`` component: ``C = psi'(Y0) / psi_+'(Y0)``."""
    dp = psi.outer.differentiate().values[-1]
    dq = plus.outer.differentiate().values[-1]
    C = complex(dp / dq)
    return psi - plus.scale(C), C


@dataclass(frozen=True, eq=False)
class SlowMode:
    psi: MultiScaleFunction
    f1: MultiScaleFunction
    plus: MultiScaleFunction
    c_plus: complex


def slow_mode(ctx: RayleighContext, scheme="numerov") -> SlowMode:
    """Decaying Rayleigh solution ``(U - c~) e^{-alpha y} - f1``.

    ``f1`` solves ``Ray_alpha f1 = -2 alpha (U - c~) U' e^{-alpha y}`` and is
    stripped of its ``psi_+`` component, so the sum is an exact homogeneous
    solution decaying like ``e^{-alpha y}``.
    """
    g = ctx.geom
    s0 = asymptotic_slow(ctx)
    du = ctx.series_of([ctx.derivs[m + 1] / math.factorial(m) for m in range(g.n_series + 1)])
    src_series = ctx.u_tilde_series.multiply(du).multiply(ctx.exp_series).scale(-2 * ctx.alpha)
    src_outer = -2 * ctx.alpha * ctx.u_tilde_outer * ctx.outer_profile[1] * np.exp(-ctx.alpha * g.outer_nodes)
    src = MultiScaleFunction(g, src_series, GridRep(g.outer_nodes, src_outer), None, Tail("slow", ctx.alpha))
    plus = psi_plus(ctx, scheme)
    f1 = invert_ray(ctx, src, scheme=scheme)
    f1, C = repair_far_field(f1, plus)
    return SlowMode(s0 - f1, f1, plus, C)


def psi_pm_alpha(ctx: RayleighContext, scheme="numerov") -> tuple[MultiScaleFunction, MultiScaleFunction]:
    """``(psi_-, psi_+)`` at wavenumber ``alpha``: asymptotic decaying form and the log solution."""
    return asymptotic_slow(ctx), psi_plus(ctx, scheme)


def wronskian(a: MultiScaleFunction, b: MultiScaleFunction, y) -> np.ndarray:
    return a.evaluate(y) * b.differentiate().evaluate(y) - a.differentiate().evaluate(y) * b.evaluate(y)
