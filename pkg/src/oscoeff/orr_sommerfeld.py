"""Orr-Sommerfeld operator, its transpose, and the composite solver.

``Orr psi = (U - c)(d^2 - alpha^2) psi - U'' psi - eps (d^2 - alpha^2)^2 psi``,
split as ``Ray_alpha + Diff`` with ``Diff = -eps (d^2 - alpha^2) d^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import critical_layer as cl
from . import rayleigh as ray
from .funcrep import NMIN, GridRep, MultiScaleFunction, SeriesRep


class NearEigenvalueError(ArithmeticError):
    """The boundary matrix is numerically singular."""


@dataclass(frozen=True, eq=False)
class OSContext:
    rayleigh: ray.RayleighContext
    scheme: str = "numerov"

    @property
    def alpha(self):
        return self.rayleigh.alpha

    @property
    def c(self):
        return self.rayleigh.c

    @property
    def eps(self):
        return self.rayleigh.eps

    @property
    def geom(self):
        return self.rayleigh.geom

    @property
    def lam(self) -> complex:
        return -1j * self.alpha * self.c

    @cached_property
    def airy(self) -> cl.AiryContext:
        return cl.make_airy_context(self.rayleigh)

    @cached_property
    def slow(self) -> ray.SlowMode:
        return ray.slow_mode(self.rayleigh, self.scheme)

    @cached_property
    def fast(self) -> MultiScaleFunction:
        return cl.fast_mode(self.airy)

    @cached_property
    def bc_matrix(self) -> np.ndarray:
        """Columns: boundary value and slope of the slow and fast decaying modes."""
        s = self.slow.psi
        f0, f1 = cl.fast_mode_boundary(self.airy)
        return np.array([[s.boundary(0), f0], [s.boundary(1), f1]], complex)

    def equilibrated_condition(self) -> float:
        A = self.bc_matrix
        D = 1.0 / np.max(np.abs(A), axis=0)
        B = A * D[None, :]
        B = B / np.max(np.abs(B), axis=1)[:, None]
        return float(np.linalg.cond(B))

    # -- profile factors ---------------------------------------------------
    @cached_property
    def u_minus_c_series(self) -> SeriesRep:
        co = self.rayleigh.t.copy()
        co[0] = self.rayleigh.derivs[0] - self.c
        return self.rayleigh.series_of(co)

    @cached_property
    def upp_series(self) -> SeriesRep:
        d = self.rayleigh.derivs
        n = self.geom.n_series
        return self.rayleigh.series_of([d[m + 2] / math.factorial(m) for m in range(n + 1)])

    @cached_property
    def inner_profile(self):
        return self.rayleigh.profile.derivatives(self.geom.inner_nodes, 2)

    def for_wavenumber(self, alpha: float) -> OSContext:
        return OSContext(self.rayleigh.for_wavenumber(alpha), self.scheme)


def make_os_context(profile, c, alpha, nu, scheme="numerov", **numerics) -> OSContext:
    return OSContext(ray.make_context(profile, c, alpha, nu, **numerics), scheme)


@dataclass(frozen=True, eq=False)
class OSSolution:
    psi: MultiScaleFunction
    diagnostics: dict = field(default_factory=dict)


def _derivs(f: MultiScaleFunction, n: int) -> list[MultiScaleFunction]:
    out = [f]
    for _ in range(n):
        out.append(out[-1].differentiate())
    return out


def _apply(ctx: OSContext, psi: MultiScaleFunction, transpose: bool) -> MultiScaleFunction:
    g = ctx.geom
    a2 = ctx.alpha**2
    eps = ctx.eps
    D = _derivs(psi, 4)

    # Series zone.
    series = None
    if psi.series is not None:
        umc = ctx.u_minus_c_series
        upp = ctx.upp_series
        s = [d.series for d in D]
        bih = s[4] - s[2].scale(2 * a2) + s[0].scale(a2 * a2)
        if not transpose:
            series = umc.multiply(s[2] - s[0].scale(a2), NMIN) - upp.multiply(s[0], NMIN) - bih.scale(eps)
        else:
            # (d^2 - a^2)((U - c) psi) - U'' psi = (U - c)(psi'' - a^2 psi) + 2 U' psi'
            up = umc.differentiate()
            series = (umc.multiply(s[2] - s[0].scale(a2), NMIN) + up.multiply(s[1], NMIN).scale(2.0)
                      - bih.scale(eps))

    def grid_part(vals, nodes, prof):
        u, up, upp = prof
        umc = u - ctx.c
        v0, v1, v2, v3, v4 = vals
        bih = v4 - 2 * a2 * v2 + a2 * a2 * v0
        if not transpose:
            return umc * (v2 - a2 * v0) - upp * v0 - eps * bih
        return umc * (v2 - a2 * v0) + 2 * up * v1 - eps * bih

    outer = None
    if psi.outer is not None:
        vals = [d.outer.values for d in D]
        outer = GridRep(g.outer_nodes, grid_part(vals, g.outer_nodes, ctx.rayleigh.outer_profile))
    inner = None
    if psi.inner is not None:
        vals = [d.inner.values for d in D]
        inner = GridRep(g.inner_nodes, grid_part(vals, g.inner_nodes, ctx.inner_profile))
    return MultiScaleFunction(g, series, outer, inner, psi.tail)


def apply_os(ctx: OSContext, psi: MultiScaleFunction) -> MultiScaleFunction:
    """``Orr psi`` zone by zone (slow and fast parts separately)."""
    return _apply(ctx, psi, transpose=False)


def apply_os_adjoint(ctx: OSContext, psi: MultiScaleFunction) -> MultiScaleFunction:
    """Transpose operator ``(d^2 - alpha^2)((U - c) psi) - U'' psi - eps (d^2 - alpha^2)^2 psi``."""
    return _apply(ctx, psi, transpose=True)


def diff_series_on_layer(ctx: OSContext, psi: MultiScaleFunction) -> np.ndarray:
    """``Diff psi = -eps (d^2 - alpha^2) psi''`` from the series, on the critical grid."""
    if psi.series is None:
        return np.zeros(len(ctx.geom.inner_nodes), complex)
    x = ctx.geom.inner_nodes
    d2 = psi.series.evaluate(x, 2)
    d4 = psi.series.evaluate(x, 4)
    return -ctx.eps * (d4 - ctx.alpha**2 * d2)


def solve_os(ctx: OSContext, f: MultiScaleFunction, enforce_bc: bool = True, cond_limit: float = 1e12) -> OSSolution:
    """Approximate solution of ``Orr psi = f``.

    Rayleigh inversion of the slow source, removal of the growing ``psi_+``
    component, critical-layer correction for the fast source and the viscous
    remainder, then (optionally) the decaying-mode combination that zeroes
    ``psi(0)`` and ``psi'(0)``.
    """
    g = ctx.geom
    f_ray = f.slow
    has_slow = f_ray.series is not None or f_ray.outer is not None
    diag = {"C_plus": 0j}
    if has_slow:
        psi1 = ray.invert_ray(ctx.rayleigh, f_ray, scheme=ctx.scheme)
        psi1, C = ray.repair_far_field(psi1, ctx.slow.plus)
        diag["C_plus"] = C
        g_b = diff_series_on_layer(ctx, psi1)
    else:
        psi1 = MultiScaleFunction.zero(g)
        g_b = np.zeros(len(g.inner_nodes), complex)
    f_b = f.inner.values if f.inner is not None else np.zeros(len(g.inner_nodes), complex)
    psi2 = cl.solve_modified_airy(ctx.airy, f_b - g_b)
    psi = psi1 + psi2
    if enforce_bc:
        cond = ctx.equilibrated_condition()
        diag["condition"] = cond
        if cond > cond_limit:
            raise NearEigenvalueError(f"boundary matrix singular at alpha = {ctx.alpha:.6g} (condition {cond:.3g})")
        rhs = -np.array([psi.boundary(0), psi.boundary(1)])
        x, y = np.linalg.solve(ctx.bc_matrix, rhs)
        psi = psi + ctx.slow.psi.scale(x) + ctx.fast.scale(y)
        diag["bc_weights"] = (complex(x), complex(y))
        scale = max(psi.sup_norm(), 1e-300)
        diag["bc_residual"] = float(max(abs(psi.boundary(0)), abs(psi.boundary(1)) / abs(ctx.airy.gamma)) / scale)
    return OSSolution(psi, diag)


def inverse_bc_norm(ctx: OSContext) -> float:
    """``||A(alpha)^{-1}||_2`` of the raw boundary matrix."""
    return float(np.linalg.norm(np.linalg.inv(ctx.bc_matrix), 2))
