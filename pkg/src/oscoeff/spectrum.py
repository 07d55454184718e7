"""Dispersion relation, eigenvalues, linear and adjoint modes.

Wavenumbers and phase speeds are rescaled as ``alpha = alpha0 nu^{1/4}`` and
``c = c0 nu^{1/4}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import critical_layer as cl
from . import rayleigh as ray
from . import specfun
from .funcrep import GridRep, MultiScaleFunction, Tail
from .orr_sommerfeld import OSContext, apply_os, apply_os_adjoint, make_os_context
from .profiles import ShearProfile


class EigenvalueError(RuntimeError):
    def __init__(self, message, trace=()):
        super().__init__(message)
        self.trace = list(trace)


def _check_nu(nu):
    if not (nu > 0 and math.isfinite(nu)):
        raise ValueError(f"nu must be positive, got {nu!r}")


def _os_context(profile, nu, alpha0, c0, numerics) -> OSContext:
    s = nu**0.25
    return make_os_context(profile, complex(c0) * s, alpha0 * s, nu, **(numerics or {}))


def dispersion_residual(profile: ShearProfile, nu: float, alpha0: float, c0: complex, numerics=None, ctx=None) -> complex:
    """``(psi_f(0)/psi_f'(0) - psi_s(0)/psi_s'(0)) / nu^{1/4}``.

    The rescaling makes the residual an order-one quantity.
    """
    _check_nu(nu)
    if ctx is None:
        ctx = _os_context(profile, nu, alpha0, c0, numerics)
    (s0, f0), (s1, f1) = ctx.bc_matrix
    if s1 == 0 or f1 == 0:
        raise ZeroDivisionError("vanishing boundary slope in the dispersion relation")
    return complex((f0 / f1 - s0 / s1) / nu**0.25)


def limit_residual(profile: ShearProfile, alpha0: float, c0: complex) -> complex:
    """Leading-order dispersion relation ``c0 (1 - Ti) - alpha0 U+^2 / U'(0)``."""
    u1 = profile.slope0
    up = profile.u_plus
    Z = (1j * u1) ** (1 / 3) * alpha0 ** (1 / 3) * c0 / u1
    ti = specfun.tietjens_complex(-Z * np.exp(5j * np.pi / 6))
    out = c0 * (1 - ti) - alpha0 * up**2 / u1
    return complex(out) if np.ndim(out) == 0 else out


def _secant(fn, x0, x1, tol, max_iter=50, label=""):
    f0, f1 = fn(x0), fn(x1)
    trace = [(x0, f0), (x1, f1)]
    for _ in range(max_iter):
        if f1 == f0:
            break
        step = f1 * (x1 - x0) / (f1 - f0)
        x2 = x1 - step
        f2 = fn(x2)
        damp = 0
        while abs(f2) > abs(f1) and damp < 8:
            step *= 0.5
            x2 = x1 - step
            f2 = fn(x2)
            damp += 1
        trace.append((x2, f2))
        x0, f0, x1, f1 = x1, f1, x2, f2
        if abs(x1 - x0) <= tol * max(1.0, abs(x1)) or f1 == 0:
            return x1, f1, trace
    raise EigenvalueError(f"{label} root iteration did not converge", trace)


def initial_guess(profile: ShearProfile, alpha0: float) -> complex:
    """Root of the leading-order relation, from a coarse scan then secant steps."""
    re, im = np.meshgrid(np.linspace(0.1, 6.0, 60), np.linspace(-1.0, 2.0, 31))
    grid = (re + 1j * im).ravel()
    r = np.abs(limit_residual(profile, alpha0, grid))
    best = complex(grid[np.argmin(r)])
    c0, _, _ = _secant(lambda z: limit_residual(profile, alpha0, z), best, best * (1 + 1e-3), 1e-13, label="limit")
    return complex(c0)


@dataclass(frozen=True, eq=False)
class Eigenpair:
    profile: ShearProfile
    nu: float
    alpha0: float
    c0: complex
    ctx: OSContext
    residual: complex
    trace: list = field(default_factory=list)

    @property
    def alpha(self) -> float:
        return self.ctx.alpha

    @property
    def c(self) -> complex:
        return self.ctx.c

    @property
    def lam(self) -> complex:
        return -1j * self.alpha * self.c

    @property
    def Z(self) -> complex:
        return self.ctx.airy.gamma * self.ctx.rayleigh.y_c

    @property
    def a(self) -> complex:
        """Fast-mode weight making the combination vanish at the wall."""
        A = self.ctx.bc_matrix
        return complex(-A[0, 0] / A[0, 1])


def find_eigenvalue(profile: ShearProfile, nu: float, alpha0: float, numerics=None, guess=None, tol=1e-12) -> Eigenpair:
    """Root of the dispersion relation near the leading-order guess."""
    _check_nu(nu)
    if not alpha0 > 0:
        raise ValueError("alpha0 must be positive")
    c_start = initial_guess(profile, alpha0) if guess is None else complex(guess)
    cache = {}

    def fn(c0):
        ctx = _os_context(profile, nu, alpha0, c0, numerics)
        cache[c0] = ctx
        return dispersion_residual(profile, nu, alpha0, c0, ctx=ctx)

    c0, res, trace = _secant(fn, c_start, c_start * (1 + 1e-4), tol, label="dispersion")
    return Eigenpair(profile, nu, alpha0, complex(c0), cache[c0], res, trace)


# --------------------------------------------------------------------------
# Modes


@dataclass(frozen=True, eq=False)
class LinearMode:
    psi: MultiScaleFunction
    u: MultiScaleFunction
    v: MultiScaleFunction
    omega: MultiScaleFunction


def build_linear_mode(e: Eigenpair) -> LinearMode:
    """``psi_lin = psi_s + a psi_f`` and its velocity and vorticity."""
    psi = e.ctx.slow.psi + e.ctx.fast.scale(e.a)
    return LinearMode(psi, psi.differentiate(), psi.scale(-1j * e.alpha), psi.vorticity(e.alpha))


@dataclass(frozen=True, eq=False)
class AdjointMode:
    """Adjoint eigenmode built from the explicit slow approximation.

    ``slow = e^{-alpha y} - f1(y_c) psi3 - g1`` solves the transposed equation
    (same ``c``) away from the wall; ``psi_t = slow + b Ai(gamma (y - y_c))``
    adds the decaying fast solution that zeroes ``psi_t(0)``.  At an eigenvalue
    this also zeroes ``psi_t'(0)`` up to the approximation error.  ``dual`` is
    the pointwise conjugate, the eigenfunction of the conjugate-linear adjoint
    used in the sesquilinear scalar products.
    """

    psi_t: MultiScaleFunction
    slow: MultiScaleFunction
    psi3: MultiScaleFunction
    f1: MultiScaleFunction
    g1: MultiScaleFunction
    f1_yc: complex
    fast_weight: complex

    @property
    def dual(self) -> MultiScaleFunction:
        return self.psi_t.conjugate()

    @property
    def boundary_mismatch(self) -> float:
        """``|psi_t'(0)|`` relative to the slope of the slow part."""
        return float(abs(self.psi_t.boundary(1)) / max(abs(self.slow.boundary(1)), 1e-300))


def build_adjoint_mode(e: Eigenpair) -> AdjointMode:
    ctx = e.ctx
    r = ctx.rayleigh
    g = ctx.geom
    f1 = ctx.slow.f1
    f1_yc = complex(f1.series.get(0, 0))
    if not np.isfinite(f1_yc):
        raise ArithmeticError("f1(y_c) is not finite")
    # psi3 = e^{-alpha y}/(U - c~) + layer correction.
    inv_u = r.u_tilde_series.reciprocal()
    s_series = inv_u.multiply(r.exp_series)
    s_outer = np.exp(-e.alpha * g.outer_nodes) / r.u_tilde_outer
    slow3 = MultiScaleFunction(g, s_series, GridRep(g.outer_nodes, s_outer), None, Tail("slow", e.alpha))
    x = g.inner_nodes
    src = ctx.eps * s_series.evaluate(x, 2)
    phi, dphi, d2phi = cl.solve_airy_values(ctx.airy, src)
    d3, d4 = cl.airy_higher_derivatives(ctx.airy, phi, dphi, d2phi, ctx.eps * s_series.evaluate(x, 3),
                                        ctx.eps * s_series.evaluate(x, 4))
    psi3 = slow3 + MultiScaleFunction.from_fast(g, phi, (dphi, d2phi, d3, d4))
    # g1 = (f1 - f1(y_c)) / (U - c); in the series zone U - c~ is used, which
    # differs by eps alpha^2 and keeps the quotient regular at y_c.
    shifted = f1.series - f1.series.monomial(g.y_c, g.sigma, g.n_series, 0, 0, f1_yc)
    g1_series = shifted.multiply(inv_u)
    g1_outer = (f1.outer.values - f1_yc) / (r.outer_profile[0] - e.c)
    g1 = MultiScaleFunction(g, g1_series, GridRep(g.outer_nodes, g1_outer), None, Tail("slow", e.alpha))
    exp_f = MultiScaleFunction(g, r.exp_series, GridRep(g.outer_nodes, np.exp(-e.alpha * g.outer_nodes) + 0j),
                               None, Tail("slow", e.alpha))
    slow = exp_f - psi3.scale(f1_yc) - g1
    fast = cl.adjoint_fast_mode(ctx.airy)
    z0 = -ctx.airy.gamma * g.y_c
    b = -slow.boundary(0) / complex(specfun.airy_ai(z0))
    return AdjointMode(slow + fast.scale(b), slow, psi3, f1, g1, f1_yc, complex(b))


def linear_residual(e: Eigenpair, mode: LinearMode, points=None) -> float:
    """``max |Orr psi_lin| / max |(U - c) omega_lin|`` at sample points."""
    res = apply_os(e.ctx, mode.psi)
    return _relative_residual(e, res, mode.psi, points)


def adjoint_residual(e: Eigenpair, adj: AdjointMode, points=None) -> float:
    res = apply_os_adjoint(e.ctx, adj.psi_t)
    return _relative_residual(e, res, adj.psi_t, points)


def _relative_residual(e, res, psi, points):
    g = e.ctx.geom
    if points is None:
        points = np.concatenate([g.inner_nodes[3:-3:7], np.linspace(g.l_c, g.sigma * 0.99, 50),
                                 g.outer_nodes[3:-3:97]])
    r = np.abs(res.evaluate(points))
    ref = np.abs(psi.vorticity(e.alpha).evaluate(points) * (e.ctx.rayleigh.profile.value(points) - e.c))
    return float(np.max(r) / np.max(ref))
