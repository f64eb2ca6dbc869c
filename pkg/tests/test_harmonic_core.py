import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from thomson_vstates.harmonic_core import (
    FourierShape,
    PolygonModel,
    c_beta,
    circulant,
    gamma_fn,
    kernel_fourier_coeffs,
    make_grid,
    mu_beta,
    pochhammer,
    product_weights,
    project_sin,
    quad_circle,
    synthesize_sin,
)

betas = st.floats(0.02, 0.98)


def test_grid_layout():
    g = make_grid(16)
    assert g.M_nodes == 16 and g.max_modes == 6
    assert np.allclose(np.abs(g.w), 1.0, atol=1e-15)
    assert np.allclose(g.phi - g.theta, g.h / 2)
    assert g.refined(4).M_nodes == 64


@pytest.mark.parametrize("bad", [7, 6, 9.5, 0])
def test_grid_rejects_bad_sizes(bad):
    with pytest.raises(ValueError):
        make_grid(bad)


def test_shape_value_matches_direct_sum(rng):
    a = rng.normal(size=7) * 0.01
    f = FourierShape(a)
    z = np.exp(1j * rng.uniform(0, 2 * np.pi, 20))
    direct = sum(an * z ** -(n + 1) for n, an in enumerate(a))
    deriv = sum(-(n + 1) * an * z ** -(n + 2) for n, an in enumerate(a))
    assert np.allclose(f.value(z), direct, atol=1e-15)
    assert np.allclose(f.derivative(z), deriv, atol=1e-15)


def test_shape_real_coefficients_give_conjugate_symmetry(rng):
    f = FourierShape(rng.normal(size=5) * 0.05)
    z = np.exp(1j * rng.uniform(0, 2 * np.pi, 10))
    assert np.allclose(f.value(np.conj(z)), np.conj(f.value(z)), atol=1e-16)


def test_shape_validation():
    with pytest.raises(ValueError):
        FourierShape([1.0 + 1.0j])
    with pytest.raises(ValueError):
        FourierShape([np.nan])
    with pytest.raises(ValueError):
        FourierShape([0.3, 0.2]).check_admissible(0.5)
    FourierShape([0.3, 0.1]).check_admissible(0.5)
    with pytest.raises(ValueError):
        FourierShape([0.0]).check_admissible(1.0)


def test_polygon_model_validation():
    assert PolygonModel(3, 1.0).scaling_power == 1.0
    assert PolygonModel(3, 1.0, "sqg", 0.25).scaling_power == 1.25
    for args in [(1, 1.0), (3, 0.0), (3, 1.0, "sqg", None), (3, 1.0, "sqg", 1.0), (3, 1.0, "mhd")]:
        with pytest.raises(ValueError):
            PolygonModel(*args)
    roots = PolygonModel(5, 1.0).roots
    assert roots.size == 4 and np.allclose(roots**5, 1.0)


@pytest.mark.parametrize("k", range(-6, 6))
def test_quad_circle_exact_on_monomials(k):
    g = make_grid(32)
    val = quad_circle(g.w**k, g.w)
    expected = 2j * math.pi if k == -1 else 0.0
    assert abs(val - expected) < 1e-13


@given(st.lists(st.floats(-1, 1), min_size=1, max_size=15))
def test_sin_projection_round_trip(c):
    c = np.asarray(c)
    s = synthesize_sin(c, 32)
    assert np.allclose(project_sin(s)[: c.size], c, atol=1e-13)


@given(st.floats(0.05, 30.0))
def test_gamma_matches_math(x):
    assert gamma_fn(x) == pytest.approx(math.gamma(x), rel=1e-13)


@given(st.floats(-4.9, 0.49).filter(lambda x: abs(x - round(x)) > 1e-3))
def test_gamma_reflection_region(x):
    assert gamma_fn(x) == pytest.approx(math.gamma(x), rel=1e-12)


def test_gamma_against_mpmath():
    for x in [0.125, 0.375, 0.5, 0.75, 0.875, 1.5, 2.25]:
        assert gamma_fn(x) == pytest.approx(float(mpmath.gamma(x)), rel=1e-14)


@pytest.mark.parametrize("x", [0, -1, -3])
def test_gamma_poles(x):
    with pytest.raises(ValueError):
        gamma_fn(x)


@given(st.floats(-3, 3), st.integers(0, 12))
def test_pochhammer_matches_mpmath(x, n):
    assert pochhammer(x, n) == pytest.approx(float(mpmath.rf(x, n)), rel=1e-12, abs=1e-300)


def test_pochhammer_recurrence_and_errors():
    assert pochhammer(0.3, 0) == 1.0
    assert pochhammer(2.0, 3) == 24.0
    with pytest.raises(ValueError):
        pochhammer(1.0, -1)


@given(betas)
def test_c_beta_variants(beta):
    g = mpmath.gamma
    printed = g(beta / 2) / (2 ** (1 - beta) * g((1 - beta) / 2))
    standard = g(beta / 2) / (2 ** (1 - beta) * g(1 - beta / 2))
    assert c_beta(beta) == pytest.approx(float(printed), rel=1e-12)
    assert c_beta(beta, "standard") == pytest.approx(float(standard), rel=1e-12)
    with pytest.raises(ValueError):
        c_beta(beta, "other")


def test_c_beta_rejects_range():
    for b in (0.0, 1.0, -0.2):
        with pytest.raises(ValueError):
            c_beta(b)


@given(betas)
def test_mu_beta_is_c_times_kernel_constant_over_pi(beta):
    kappa = 2 * math.pi * kernel_fourier_coeffs(beta, 1)[1]
    assert mu_beta(beta) == pytest.approx(c_beta(beta) * kappa / math.pi, rel=1e-12)


@pytest.mark.parametrize("beta", [0.25, 0.5, 0.75])
def test_kernel_fourier_coeffs_against_mpmath(beta):
    c = kernel_fourier_coeffs(beta, 4)
    q = 1 / (1 - beta)  # s = u^q removes the endpoint singularity
    for p in range(5):
        val = mpmath.quad(
            lambda u: (2 * mpmath.sin(u**q / 2)) ** (-beta) * mpmath.cos(p * u**q) * q * u ** (q - 1),
            [0, mpmath.pi ** (1 - beta)],
        )
        assert c[p] == pytest.approx(float(val / mpmath.pi), rel=1e-10)


@pytest.mark.parametrize("beta", [0.25, 0.5, 0.75])
def test_product_weights_exact_on_trig_polynomials(beta):
    M = 32
    rho = product_weights(beta, M)
    g = make_grid(M)
    c = kernel_fourier_coeffs(beta, M)
    # int |1 - e^{i psi}|^-beta e^{i p psi} dpsi = 2 pi c_p; nodes xi_k relative to w_0 = 1
    for p in range(-M // 2 + 1, M // 2):
        approx = np.sum(rho * g.xi**p)
        assert abs(approx - 2 * math.pi * c[abs(p)]) < 1e-12


def test_circulant_layout():
    R = circulant(np.arange(4))
    assert R[0].tolist() == [0, 1, 2, 3]
    assert R[1].tolist() == [3, 0, 1, 2]
