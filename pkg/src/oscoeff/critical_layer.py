"""Critical-layer operators: the fast mode and Green-function inversions.

Near ``y_c`` the viscous operator is approximated by
``Airy = -eps d^2/dy^2 + U'(y_c) (y - y_c)`` and
``A = Airy o (d^2/dy^2 - alpha^2)``.  With ``z = gamma (y - y_c)`` and
``eps gamma^3 = U'(y_c)`` the homogeneous solutions of ``Airy`` are ``Ai(z)``
(decaying into the flow) and ``Ci(z)`` (growing).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.integrate import cumulative_simpson

from . import specfun
from .funcrep import Geometry, MultiScaleFunction


class LayerAssumptionError(ValueError):
    """A source or solution is not confined to the critical layer."""


@dataclass(frozen=True, eq=False)
class AiryContext:
    y_c: complex
    eps: complex
    alpha: float
    u1: complex
    geom: Geometry
    w: complex = specfun.WRONSKIAN

    @property
    def gamma(self) -> complex:
        return (self.u1 / self.eps) ** (1.0 / 3.0)

    def z(self, y):
        return self.gamma * (np.asarray(y) - self.y_c)

    @cached_property
    def _nodes_airy(self):
        zs = self.z(self.geom.inner_nodes)
        ai, aip, ai1, ai2 = specfun.airy_bundle(zs)
        ci = specfun.airy_ci(zs)
        cip = specfun.airy_ci(zs, 1)
        return zs, ai, aip, ai1, ai2, ci, cip


def make_airy_context(rctx) -> AiryContext:
    """Critical-layer context matching a Rayleigh context."""
    if rctx.alpha <= 0:
        raise ValueError("the critical layer needs alpha > 0")
    return AiryContext(rctx.y_c, rctx.eps, rctx.alpha, complex(rctx.derivs[1]), rctx.geom)


def fast_mode(ctx: AiryContext) -> MultiScaleFunction:
    """``Ai(2, gamma (y - y_c))`` on the critical grid with exact derivatives."""
    zs, ai, aip, ai1, ai2, _, _ = ctx._nodes_airy
    g = ctx.gamma
    derivs = (g * ai1, g**2 * ai, g**3 * aip, g**4 * zs * ai, g**5 * (ai + zs * aip))
    return MultiScaleFunction.from_fast(ctx.geom, ai2, derivs)


def adjoint_fast_mode(ctx: AiryContext) -> MultiScaleFunction:
    """``Ai(gamma (y - y_c))``, the decaying fast solution of the transposed operator."""
    zs, ai, aip, _, _, _, _ = ctx._nodes_airy
    g = ctx.gamma
    derivs = (g * aip, g**2 * zs * ai, g**3 * (ai + zs * aip), g**4 * (2 * aip + zs * zs * ai))
    return MultiScaleFunction.from_fast(ctx.geom, ai, derivs)


def fast_mode_boundary(ctx: AiryContext) -> tuple[complex, complex]:
    """``(psi_f(0), psi_f'(0)) = (Ai(2, -gamma y_c), gamma Ai(1, -gamma y_c))``."""
    z0 = -ctx.gamma * ctx.y_c
    return complex(specfun.airy_iterated(z0, 2)), complex(ctx.gamma * specfun.airy_iterated(z0, 1))


def green_airy(ctx: AiryContext, x, y):
    """Green function of ``-eps d^2 + U'(y_c)(y - y_c)``, source at ``x``."""
    x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    zx, zy = ctx.z(x), ctx.z(y)
    den = ctx.eps * ctx.gamma * ctx.w
    below = -specfun.airy_ci(zy) * specfun.airy_ai(zx) / den
    above = -specfun.airy_ai(zy) * specfun.airy_ci(zx) / den
    out = np.where(y < x, below, above)
    return out[()] if out.ndim == 0 else out


def _source_values(ctx, psi) -> np.ndarray:
    if isinstance(psi, MultiScaleFunction):
        if psi.series is not None or psi.outer is not None:
            raise ValueError("critical-layer solves take a layer-grid source")
        return np.zeros(len(ctx.geom.inner_nodes), complex) if psi.inner is None else psi.inner.values
    return np.asarray(psi, complex)


def _cumulative(f, x):
    f = np.asarray(f, complex)
    re = cumulative_simpson(f.real, x=x, initial=0.0)
    im = cumulative_simpson(f.imag, x=x, initial=0.0)
    return re + 1j * im


def _cumulative_from_end(f, x):
    """``int_y^L f`` accumulated from the far end (no cancellation)."""
    return _cumulative(f[::-1], x[-1] - x[::-1])[::-1]


def _edge_ratio(v):
    m = np.max(np.abs(v))
    return 0.0 if m == 0 else float(np.abs(v[-1]) / m)


def solve_airy_values(ctx: AiryContext, rhs, edge_tol: float = 1e-4):
    """``phi, phi', phi''`` with ``Airy phi = rhs`` on the critical grid."""
    rhs = _source_values(ctx, rhs)
    x = ctx.geom.inner_nodes
    zs, ai, aip, _, _, ci, cip = ctx._nodes_airy
    if not np.any(rhs):
        z = np.zeros_like(rhs)
        return z, z.copy(), z.copy()
    if _edge_ratio(rhs) > edge_tol:
        raise LayerAssumptionError(f"source does not decay across the critical layer (edge ratio {_edge_ratio(rhs):.2e})")
    i_c = _cumulative(ci * rhs, x)  # int_0^y Ci psi
    i_a = _cumulative_from_end(ai * rhs, x)  # int_y^L Ai psi
    den = ctx.eps * ctx.gamma * ctx.w
    phi = -(ai * i_c + ci * i_a) / den
    dphi = -ctx.gamma * (aip * i_c + cip * i_a) / den
    d2phi = (ctx.u1 * (x - ctx.y_c) * phi - rhs) / ctx.eps
    return phi, dphi, d2phi


def airy_higher_derivatives(ctx: AiryContext, phi, dphi, d2phi, drhs, d2rhs):
    """Third and fourth derivatives of an Airy solution.

    Differentiating ``-eps phi'' + U'(y_c)(y - y_c) phi = rhs`` avoids finite
    differences of a function varying on the ``1/gamma`` scale.

    Args:
        ctx: critical-layer context.
        phi, dphi, d2phi: solution and first two derivatives on the layer grid.
        drhs, d2rhs: first two derivatives of the source.

    Returns:
        ``(phi''', phi'''')``.
    """
    x = ctx.geom.inner_nodes - ctx.y_c
    d3 = (ctx.u1 * (phi + x * dphi) - drhs) / ctx.eps
    d4 = (ctx.u1 * (2 * dphi + x * d2phi) - d2rhs) / ctx.eps
    return d3, d4


def solve_airy(ctx: AiryContext, psi, edge_tol: float = 1e-4) -> MultiScaleFunction:
    """Solve ``Airy phi = psi`` by quadrature of the Green kernel."""
    phi, dphi, d2phi = solve_airy_values(ctx, psi, edge_tol)
    return MultiScaleFunction.from_fast(ctx.geom, phi, (dphi, d2phi))


def _shc(t):
    """``sinh(t)/t``."""
    t = np.asarray(t, float)
    out = np.ones_like(t)
    m = t != 0
    out[m] = np.sinh(t[m]) / t[m]
    return out


def solve_modified_airy(ctx: AiryContext, F, edge_tol: float = 1e-4, decay_tol: float = 1e-3) -> MultiScaleFunction:
    """Solve ``Airy (d^2 - alpha^2) phi = F`` on the critical grid.

    First ``Airy phi1 = F``; then ``phi = int_y^L sinh(alpha(x-y))/alpha phi1(x) dx``,
    the solution of ``(d^2 - alpha^2) phi = phi1`` that vanishes beyond the layer.
    """
    phi1, dphi1, d2phi1 = solve_airy_values(ctx, F, edge_tol)
    x = ctx.geom.inner_nodes
    if not np.any(phi1):
        return MultiScaleFunction.from_fast(ctx.geom, phi1, (phi1, phi1, phi1, phi1))
    if _edge_ratio(phi1) > decay_tol:
        raise LayerAssumptionError(f"Airy solution not negligible at the layer edge (ratio {_edge_ratio(phi1):.2e})")
    a = ctx.alpha
    sh = x * _shc(a * x)  # sinh(a x)/a
    ch = np.cosh(a * x)
    S = _cumulative_from_end(sh * phi1, x)
    C = _cumulative_from_end(ch * phi1, x)
    phi = ch * S - sh * C
    dphi = a * a * sh * S - ch * C
    d2 = phi1 + a * a * phi
    d3 = dphi1 + a * a * dphi
    d4 = d2phi1 + a * a * d2
    return MultiScaleFunction.from_fast(ctx.geom, phi, (dphi, d2, d3, d4))


def apply_airy_values(ctx: AiryContext, phi, d2phi):
    """``-eps phi'' + U'(y_c)(y - y_c) phi`` on the critical grid."""
    x = ctx.geom.inner_nodes
    return -ctx.eps * d2phi + ctx.u1 * (x - ctx.y_c) * phi
