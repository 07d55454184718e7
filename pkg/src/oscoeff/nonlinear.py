"""Quadratic and cubic interactions, second harmonic and the Landau coefficient.

Modes carry the factor ``exp(i k alpha x + s t)``.  For stream functions
``psi_a`` (wavenumber ``alpha_a``) and ``psi_b`` (``alpha_b``) the advection
``(u_a . grad) omega_b`` has wavenumber ``alpha_a + alpha_b`` and payload
``i alpha_b psi_a' omega_b - i alpha_a psi_a omega_b'``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import simpson

from .funcrep import NMIN, GridRep, MultiScaleFunction, inner_product_v
from .orr_sommerfeld import NearEigenvalueError, solve_os
from .spectrum import AdjointMode, Eigenpair, LinearMode, build_adjoint_mode, build_linear_mode, find_eigenvalue


BOOKKEEPING_RTOL = 1e-12


class ResonanceError(ArithmeticError):
    """A denominator of the cubic projection (``c hat``) vanishes."""


class DegenerateNormalizationError(ArithmeticError):
    """``phi_0 = (psi_lin, psi_t)_v`` vanishes."""


# --------------------------------------------------------------------------
# Advection


def _same_center(f: MultiScaleFunction, g: MultiScaleFunction) -> bool:
    return f.series is None or g.series is None or f.series.center == g.series.center


def _product(f: MultiScaleFunction, g: MultiScaleFunction) -> MultiScaleFunction:
    """Pointwise product.

    When the series are centred at different points (a mode times a
    conjugated mode) the series of the result is only a bookkeeping
    expansion: factors are re-expanded about ``y_c``, which keeps the
    basis inventory but not the values.  Grid parts are always exact.
    """
    if _same_center(f, g):
        return f.multiply(g)
    geom = g.geom
    r_min = abs(geom.y_c.imag)

    def book(s):
        if s.center != geom.y_c:
            s = s.recenter_bookkeeping(geom.y_c)
        return s.prune(r_min, BOOKKEEPING_RTOL)

    series = book(f.series).multiply(book(g.series), NMIN).prune(r_min, BOOKKEEPING_RTOL)
    outer = None
    if f.outer is not None and g.outer is not None:
        outer = GridRep(geom.outer_nodes, f.outer.values * g.outer.values)
    inner = None
    if f.inner is not None or g.inner is not None:
        a_s, b_s = f.slow_on_inner(), g.slow_on_inner()
        a_f = f.inner.values if f.inner is not None else 0.0
        b_f = g.inner.values if g.inner is not None else 0.0
        inner = GridRep(geom.inner_nodes, np.asarray(a_f * b_s + a_s * b_f + a_f * b_f, complex) + 0j)
    return MultiScaleFunction(geom, series, outer, inner, f.tail.combine_product(g.tail))


def advect(psi_a: MultiScaleFunction, alpha_a: float, psi_b: MultiScaleFunction, alpha_b: float) -> MultiScaleFunction:
    """Payload of ``(u_a . grad) omega_b`` at wavenumber ``alpha_a + alpha_b``."""
    if psi_a.geom is not psi_b.geom and psi_a.geom != psi_b.geom:
        raise ValueError("advect needs functions on the same geometry")
    omega_b = psi_b.vorticity(alpha_b)
    out = _product(psi_a.differentiate(), omega_b).scale(1j * alpha_b)
    if alpha_a != 0:
        out = out - _product(psi_a, omega_b.differentiate()).scale(1j * alpha_a)
    return out


def advect_values(psi_a: MultiScaleFunction, alpha_a: float, psi_b: MultiScaleFunction, alpha_b: float, y) -> np.ndarray:
    """Pointwise values of :func:`advect`, each factor evaluated exactly."""
    y = np.asarray(y, float)
    omega_b = psi_b.vorticity(alpha_b)
    out = 1j * alpha_b * psi_a.differentiate().evaluate(y) * omega_b.evaluate(y)
    if alpha_a != 0:
        out = out - 1j * alpha_a * psi_a.evaluate(y) * omega_b.differentiate().evaluate(y)
    return out


@dataclass(frozen=True, eq=False)
class InteractionSource:
    """Interaction term ``payload(y) exp(i k alpha x + s t)``.

    ``terms`` lists ``(weight, psi_a, alpha_a, psi_b, alpha_b)`` advection
    terms; pointwise values are rebuilt from them, which stays exact when the
    payload series is only a bookkeeping expansion.
    """

    wavenumber_index: int
    temporal_exponent: complex
    payload: MultiScaleFunction
    terms: tuple = field(default_factory=tuple)
    series_exact: bool = True

    def evaluate(self, y) -> np.ndarray:
        y = np.asarray(y, float)
        if self.series_exact or not self.terms:
            return self.payload.evaluate(y)
        out = np.zeros(y.shape, complex)
        for w, pa, aa, pb, ab in self.terms:
            out = out + w * advect_values(pa, aa, pb, ab, y)
        return out

    def conjugate(self) -> InteractionSource:
        """Source at the opposite wavenumber (pointwise conjugate)."""
        terms = tuple((np.conj(w), pa.conjugate(), -aa, pb.conjugate(), -ab) for w, pa, aa, pb, ab in self.terms)
        return InteractionSource(-self.wavenumber_index, np.conj(self.temporal_exponent), self.payload.conjugate(),
                                 terms, self.series_exact)


def _combine(terms) -> tuple[MultiScaleFunction, bool]:
    total = None
    exact = True
    for w, pa, aa, pb, ab in terms:
        exact = exact and _same_center(pa, pb)
        part = advect(pa, aa, pb, ab).scale(w)
        total = part if total is None else total + part
    return total, exact


def quadratic_source(e: Eigenpair, mode: LinearMode) -> InteractionSource:
    """``Q1+ = -(u_lin+ . grad) omega_lin+`` at wavenumber ``2 alpha``, exponent ``2 lambda``."""
    terms = ((-1.0, mode.psi, e.alpha, mode.psi, e.alpha),)
    payload, exact = _combine(terms)
    return InteractionSource(2, 2 * e.lam, payload, terms, exact)


def mean_mode_source(e: Eigenpair, mode: LinearMode) -> InteractionSource:
    """Wavenumber-0 part of ``-(u_lin . grad) omega_lin`` from the +/- pairs."""
    minus = mode.psi.conjugate()
    a = e.alpha
    terms = ((-1.0, mode.psi, a, minus, -a), (-1.0, minus, -a, mode.psi, a))
    payload, exact = _combine(terms)
    return InteractionSource(0, 2 * e.lam.real, payload, terms, exact)


def solve_second_harmonic(e: Eigenpair, q1: InteractionSource, cond_limit: float = 1e12):
    """``Orr_{2 lambda, 2 alpha}(psi_q+) = (i / 2 alpha) Q1+`` with wall conditions.

    Returns:
        ``(psi_q, diagnostics)`` from the composite solver.

    Raises:
        NearEigenvalueError: the boundary matrix at ``2 alpha`` is singular.
    """
    if q1.wavenumber_index != 2:
        raise ValueError("second-harmonic solve needs the wavenumber-2 source")
    ctx2 = e.ctx.for_wavenumber(2 * e.alpha)
    try:
        sol = solve_os(ctx2, q1.payload.scale(1j / (2 * e.alpha)), enforce_bc=True, cond_limit=cond_limit)
    except NearEigenvalueError as exc:
        raise NearEigenvalueError(f"resonance at 2 alpha: {exc}") from exc
    diag = dict(sol.diagnostics)
    diag["inverse_bc_norm"] = float(np.linalg.norm(np.linalg.inv(ctx2.bc_matrix), 2))
    return sol.psi, diag


def cubic_source(e: Eigenpair, mode: LinearMode, psi_q: MultiScaleFunction) -> InteractionSource:
    """Wavenumber ``+alpha`` part of ``-(u_lin . grad) omega_q - (u_q . grad) omega_lin``.

    Exponent ``2 lambda + conj(lambda)``.  The payload series is a bookkeeping
    expansion about ``y_c`` (the conjugate mode is centred at ``conj(y_c)``);
    use :meth:`InteractionSource.evaluate` for values.  Factors of the
    bookkeeping product are pruned at ``BOOKKEEPING_RTOL`` of their largest
    term over the series zone.
    """
    minus = mode.psi.conjugate()
    a = e.alpha
    terms = ((-1.0, minus, -a, psi_q, 2 * a), (-1.0, psi_q, 2 * a, minus, -a))
    payload, exact = _combine(terms)
    return InteractionSource(1, 2 * e.lam + np.conj(e.lam), payload, terms, exact)


def singular_inventory(src: InteractionSource, rtol: float = 1e-9) -> set[tuple[int, int]]:
    """Singular basis terms ``(n, k)`` of the payload series that matter.

    A term counts when its largest size over ``|Im y_c| <= |Y| <= sigma``
    exceeds ``rtol`` times the largest payload value on the layer grid.
    """
    s = src.payload.series
    g = src.payload.geom
    ys, _ = g.layer_quadrature
    ref = float(np.max(np.abs(src.evaluate(ys))))
    w = s.term_weights(abs(g.y_c.imag))
    out = set()
    for k in range(w.shape[0]):
        for i in np.nonzero(w[k] > rtol * ref)[0]:
            n = int(i) + NMIN
            if n < 0 or (n == 0 and k > 0):
                out.add((n, k))
    return out


# --------------------------------------------------------------------------
# Projection and the Landau coefficient


def integrate_source(src: InteractionSource, weight: MultiScaleFunction) -> complex:
    """``int_0^Y0 src(y) weight(y) dy`` (layer Gauss panels plus outer Simpson)."""
    g = weight.geom
    ys, ws = g.layer_quadrature
    total = complex(np.sum(ws * src.evaluate(ys) * weight.evaluate(ys)))
    nodes = g.outer_nodes
    total += complex(simpson(src.evaluate(nodes) * weight.evaluate(nodes), x=nodes))
    return total


def bilinear_v(f: MultiScaleFunction, g: MultiScaleFunction, alpha: float) -> complex:
    """``int omega_f g dy``: the ``v`` product against the conjugate of ``g``."""
    g_bar = g.conjugate()
    return inner_product_v(f, g_bar, alpha)


@dataclass(frozen=True, eq=False)
class LandauResult:
    phi0: complex
    c_hat: complex
    inner_c: complex
    A: complex
    lam: complex
    diagnostics: dict = field(default_factory=dict)

    def closure(self) -> float:
        """Relative defect of ``A |phi0|^2 phi0 / (2 lambda) = inner_c``."""
        lhs = self.A * abs(self.phi0) ** 2 * self.phi0 / (2 * self.lam)
        return float(abs(lhs - self.inner_c) / abs(self.inner_c))


def landau_coefficient(e: Eigenpair, mode: LinearMode, adj: AdjointMode, q2: InteractionSource,
                       pairing: str = "bilinear", phi_tol: float = 1e-6, c_hat_tol: float = 1e-300) -> LandauResult:
    """``A = 2 lambda (psi_c, psi_t)_v / (|phi0|^2 phi0)`` through the adjoint shortcut.

    ``(psi_c, psi_t)_v = -(i / (alpha c_hat)) int Q2 conj(psi_t~)`` where
    ``psi_t~`` is the adjoint eigenfunction of the chosen pairing:
    ``"bilinear"`` uses the conjugate of the transposed mode (so the integrand
    is ``Q2 psi_t``), ``"sesquilinear"`` uses the transposed mode itself.
    """
    if q2.wavenumber_index != 1:
        raise ValueError("the projection needs the wavenumber-1 cubic source")
    if pairing == "bilinear":
        partner = adj.dual
    elif pairing == "sesquilinear":
        partner = adj.psi_t
    else:
        raise ValueError(f"unknown pairing {pairing!r}")

    a = e.alpha
    phi0 = inner_product_v(mode.psi, partner, a)
    scale = mode.psi.sup_norm() * adj.psi_t.sup_norm()
    if abs(phi0) <= phi_tol * scale:
        raise DegenerateNormalizationError(f"phi0 = {phi0!r} is degenerate")
    c_hat = e.c + (2 * e.lam + np.conj(e.lam)) / (1j * a)
    if abs(c_hat) <= c_hat_tol:
        raise ResonanceError("c hat vanishes")
    proj = integrate_source(q2, partner.conjugate())
    inner_c = -1j / (a * c_hat) * proj
    A = 2 * e.lam * inner_c / (abs(phi0) ** 2 * phi0)
    return LandauResult(complex(phi0), complex(c_hat), complex(inner_c), complex(A), complex(e.lam),
                        {"pairing": pairing, "projection": complex(proj), "phi0_scale": scale})


@dataclass(frozen=True, eq=False)
class Pipeline:
    """Everything computed on the way to ``A`` for one ``(profile, nu, alpha0)``."""

    eigen: Eigenpair
    mode: LinearMode
    adjoint: AdjointMode
    q1: InteractionSource
    psi_q: MultiScaleFunction
    q2: InteractionSource
    landau: LandauResult
    second_harmonic: dict


def run_pipeline(profile, nu: float, alpha0: float, numerics=None, guess=None, pairing="bilinear",
                 eigen: Eigenpair | None = None) -> Pipeline:
    """Eigenpair, modes, sources and ``A`` at default or given numerics."""
    e = eigen if eigen is not None else find_eigenvalue(profile, nu, alpha0, numerics=numerics, guess=guess)
    mode = build_linear_mode(e)
    adj = build_adjoint_mode(e)
    q1 = quadratic_source(e, mode)
    psi_q, diag = solve_second_harmonic(e, q1)
    q2 = cubic_source(e, mode, psi_q)
    res = landau_coefficient(e, mode, adj, q2, pairing=pairing)
    return Pipeline(e, mode, adj, q1, psi_q, q2, res, diag)


def refined_numerics(numerics=None) -> dict:
    """Numerics with the outer step and the layer step halved."""
    n = dict(numerics or {})
    n["h"] = n.get("h", 1e-3) / 2
    n["hc_divisor"] = int(n.get("hc_divisor", 2000)) * 2
    return n


def landau_with_refinement(profile, nu: float, alpha0: float, numerics=None, pairing="bilinear") -> Pipeline:
    """Pipeline at the given numerics plus the relative change of ``A`` under refinement."""
    base = run_pipeline(profile, nu, alpha0, numerics, pairing=pairing)
    fine = run_pipeline(profile, nu, alpha0, refined_numerics(numerics), guess=base.eigen.c0, pairing=pairing)
    delta = abs(fine.landau.A - base.landau.A) / abs(base.landau.A)
    diag = dict(base.landau.diagnostics, refine_delta=float(delta), A_refined=fine.landau.A)
    return replace(base, landau=replace(base.landau, diagnostics=diag))
