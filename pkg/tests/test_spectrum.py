import cmath
import math

import numpy as np
import pytest

from oscoeff import spectrum as S
from oscoeff.nonlinear import bilinear_v

from .conftest import NU

Q = NU**0.25


@pytest.fixture(scope="module")
def exp_e(exp_pipeline):
    return exp_pipeline.eigen


@pytest.fixture(scope="module")
def exp_e26(exp_profile):
    return S.find_eigenvalue(exp_profile, 1e-26, 1.5)


@pytest.fixture(scope="module")
def exp_e34(exp_profile):
    return S.find_eigenvalue(exp_profile, 1e-34, 1.5)


def layer_and_outside(e):
    g = e.ctx.geom
    inside = g.inner_nodes
    outside = np.concatenate([np.linspace(g.l_c, 0.99 * g.sigma, 400), np.linspace(g.sigma, g.outer_nodes[-1], 2000)])
    return inside, outside


# -- dispersion relation -----------------------------------------------------


def test_residual_at_root(exp_e):
    assert abs(exp_e.residual) <= 1e-10
    again = S.dispersion_residual(exp_e.profile, exp_e.nu, exp_e.alpha0, exp_e.c0)
    assert abs(again) <= 1e-10


def test_eigenpair_invariants(exp_e):
    assert abs(exp_e.lam - (-1j * exp_e.alpha * exp_e.c)) <= 1e-14 * abs(exp_e.lam)
    assert exp_e.alpha == pytest.approx(1.5 * Q, rel=1e-14)
    assert exp_e.c == pytest.approx(exp_e.c0 * Q, rel=1e-14)
    assert exp_e.lam.real > 0
    assert 0.01 <= abs(exp_e.a) / Q <= 100


def test_residual_is_analytic(exp_profile):
    c0, h = 2.2 + 0.25j, 1e-4  # truncation and evaluation noise both near 4e-8 here

    def f(z):
        return S.dispersion_residual(exp_profile, NU, 1.5, z)

    dx = (f(c0 + h) - f(c0 - h)) / (2 * h)
    dy = (f(c0 + 1j * h) - f(c0 - 1j * h)) / (2 * h)
    assert abs(dx + 1j * dy) <= 1e-6 * abs(dx)


def _limit_gap(profile, nu, alpha0, c0):
    # The full residual is psi_f/psi_f' - psi_s/psi_s' over nu^{1/4}; the limit form carries an extra U'(0).
    full = S.dispersion_residual(profile, nu, alpha0, c0) * profile.slope0
    lim = S.limit_residual(profile, alpha0, c0)
    return abs(full - lim), abs(lim)


def test_limit_consistency_blasius(blasius):
    gap, scale = _limit_gap(blasius, NU, 0.5, 1.0 + 0.1j)
    assert gap <= 5 * Q * scale


def test_limit_consistency_exponential(exp_profile):
    # U''(0) != 0 adds an alpha c log c term to the slow mode at the wall, so the gap is 0.63 nu^{1/4} |log nu|.
    gap, scale = _limit_gap(exp_profile, NU, 1.5, 1.0 + 0.1j)
    assert gap <= 5 * Q * scale


def test_limit_gap_follows_log_law(exp_profile):
    coef = []
    for nu in (1e-26, 1e-30, 1e-34):
        gap, _ = _limit_gap(exp_profile, nu, 1.5, 1.0 + 0.1j)
        coef.append(gap / (nu**0.25 * abs(math.log(nu))))
    assert max(coef) / min(coef) < 1.05


def test_initial_guess_is_unstable_and_near_root(exp_profile, exp_e):
    g = S.initial_guess(exp_profile, 1.5)
    assert g.imag > 0
    assert abs(S.limit_residual(exp_profile, 1.5, g)) <= 1e-12
    assert abs(g - exp_e.c0) <= 1e-4 * abs(g)


def test_argument_of_z(exp_e):
    # Z = (i U'(0))^{1/3} alpha0^{1/3} c0 / U'(0) at leading order, so arg(Z / c0) = pi/6.
    assert abs(cmath.phase(exp_e.Z / exp_e.c0) - math.pi / 6) <= 1e-6


def test_limit_relation_has_no_root_near_zero(exp_profile):
    # As c0 -> 0, c0 (1 - Ti) tends to K alpha0^{-1/3} with K non-real, so no root reaches c0 = 0.
    for a in (0.05, 0.3, 1.0):
        k = S.limit_residual(exp_profile, a, 1e-6) + a
        assert abs(cmath.phase(k)) > 2.0


def test_limit_root_is_continuous_in_alpha0(exp_profile):
    c = S.initial_guess(exp_profile, 1.5)
    for a in np.arange(1.45, 0.2, -0.05):
        prev = c
        c, _, _ = S._secant(lambda z, a=a: S.limit_residual(exp_profile, a, z), c, c * (1 + 1e-3), 1e-13)
        assert abs(c - prev) < 0.2


def test_secant_failure_carries_trace():
    with pytest.raises(S.EigenvalueError) as info:
        S._secant(lambda z: np.exp(z), 0.0, 0.5, 1e-13, max_iter=10)
    assert len(info.value.trace) >= 10


def test_invalid_viscosity(exp_profile):
    for nu in (0.0, -1e-30, float("nan")):
        with pytest.raises(ValueError):
            S.find_eigenvalue(exp_profile, nu, 1.5)
    with pytest.raises(ValueError):
        S.find_eigenvalue(exp_profile, NU, -1.0)


# -- eigenvalues -------------------------------------------------------------


def test_lambda_exponential(exp_e):
    assert exp_e.lam.real == pytest.approx(4.8e-16, rel=0.01)
    assert abs(exp_e.lam.imag) == pytest.approx(3.7e-15, rel=0.015)
    # Im lambda = -alpha Re c with Re c > 0: the mode travels downstream.
    assert exp_e.lam.imag == pytest.approx(-exp_e.alpha * exp_e.c.real, rel=1e-14)


def test_lambda_blasius(blasius_pipeline):
    lam = blasius_pipeline.eigen.lam
    assert lam.real == pytest.approx(1.74e-16, rel=0.01)
    assert lam.imag == pytest.approx(-1.02e-15, rel=0.01)


def test_growth_rate_scales_as_sqrt_nu(exp_e, exp_e34):
    assert exp_e.lam.real / exp_e34.lam.real == pytest.approx(100, rel=0.15)


# -- linear mode -------------------------------------------------------------


def test_linear_mode_boundary_values(exp_pipeline):
    psi = exp_pipeline.mode.psi
    norm = psi.sup_norm()
    assert abs(psi.boundary(0)) <= 1e-8 * norm
    assert abs(psi.boundary(1)) <= 1e-8 * norm


def test_linear_mode_fields(exp_pipeline):
    e, m = exp_pipeline.eigen, exp_pipeline.mode
    y = np.array([0.5 * e.ctx.geom.l_c, 0.01, 1.0])
    assert np.allclose(m.v.evaluate(y), -1j * e.alpha * m.psi.evaluate(y), rtol=1e-14)
    assert np.allclose(m.u.evaluate(y), m.psi.differentiate().evaluate(y), rtol=1e-14)


def test_linear_mode_residual(exp_pipeline):
    assert S.linear_residual(exp_pipeline.eigen, exp_pipeline.mode) <= 1e-4


def _vorticity_ratio(e):
    m = S.build_linear_mode(e)
    inside, outside = layer_and_outside(e)
    return np.max(np.abs(m.omega.evaluate(inside))) / np.max(np.abs(m.omega.evaluate(outside)))


def test_vorticity_scaling(exp_e, exp_e26):
    r30, r26 = _vorticity_ratio(exp_e), _vorticity_ratio(exp_e26)
    exponent = math.log(r30 / r26) / math.log(1e-26 / 1e-30)
    assert exponent == pytest.approx(0.25, abs=0.05)


def _v_at_critical_point(e):
    m = S.build_linear_mode(e)
    _, outside = layer_and_outside(e)
    v_yc = abs(m.v.evaluate(e.ctx.geom.y_c.real))
    return v_yc, np.max(np.abs(m.v.evaluate(outside)))


def test_vertical_velocity_in_layer_relative(exp_e, exp_e26):
    v30, vmax30 = _v_at_critical_point(exp_e)
    v26, vmax26 = _v_at_critical_point(exp_e26)
    assert Q / 30 <= v30 / vmax30 <= 30 * Q
    exponent = math.log((v26 / vmax26) / (v30 / vmax30)) / math.log(1e-26 / 1e-30)
    assert exponent == pytest.approx(0.25, abs=0.05)


def test_vertical_velocity_in_layer_absolute(exp_e):
    # Expected order of magnitude at nu = 1e-30: 1e-9.
    m = S.build_linear_mode(exp_e)
    inside, _ = layer_and_outside(exp_e)
    v = np.max(np.abs(m.v.evaluate(inside)))
    assert 1e-9 / 30 <= v <= 30e-9


# -- adjoint mode ------------------------------------------------------------


@pytest.mark.parametrize("name", ["exp_pipeline", "blasius_pipeline"])
def test_adjoint_residual(request, name):
    p = request.getfixturevalue(name)
    assert S.adjoint_residual(p.eigen, p.adjoint) <= 1e-4


def test_adjoint_wall_values(exp_pipeline):
    adj = exp_pipeline.adjoint
    assert abs(adj.psi_t.boundary(0)) <= 1e-10 * adj.psi_t.sup_norm()
    assert adj.boundary_mismatch <= 1e-6


def test_g1_is_regular(exp_pipeline):
    g1 = exp_pipeline.adjoint.g1.series
    weight = np.max(np.abs(g1.coef))
    assert all(n >= 0 for n, _ in g1.singular_terms(tol=1e-12 * weight))


def test_adjoint_normalization_non_degenerate(exp_pipeline):
    e, m, adj = exp_pipeline.eigen, exp_pipeline.mode, exp_pipeline.adjoint
    phi0 = bilinear_v(m.psi, adj.psi_t, e.alpha)
    assert abs(phi0) >= 1e-6 * m.psi.sup_norm() * adj.psi_t.sup_norm()
