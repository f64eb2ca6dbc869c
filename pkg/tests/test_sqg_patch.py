import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_shape_coeffs
from thomson_vstates.euler_patch import PatchOverlapError
from thomson_vstates.harmonic_core import FourierShape, PolygonModel, c_beta, make_grid
from thomson_vstates.linear_theory import circle_kernel_integral, mode_integrals_quadrature
from thomson_vstates.point_vortex import omega_sqg
from thomson_vstates.sqg_patch import (
    TaylorRadiusError,
    circle_kernel_constant,
    evaluate_sqg,
    f_sqg,
    f_tilde_sqg,
    j_sqg,
    omega_closure_sqg,
    phi_beta,
    singular_integral,
    taylor_split,
    velocity_direct_sqg,
)

GRID = make_grid(128)
ZERO = FourierShape.zeros(4)


def reflect(samples):
    return np.roll(samples[::-1], 1)


def test_taylor_split_reference_values():
    assert taylor_split(1.0, 0.0, 0.5) == 0.0
    assert float(taylor_split(1.0, 0.3, 0.5)) == pytest.approx(1.3**-0.5 - 1.0, abs=1e-12)
    assert float(taylor_split(1.0, 0.3, 0.5)) == pytest.approx(-0.1229420, abs=1e-7)


@given(
    st.floats(0.1, 3.0),
    st.floats(0, 2 * math.pi),
    st.floats(0.0, 0.8),
    st.floats(0, 2 * math.pi),
    st.floats(0.05, 0.95),
)
def test_taylor_split_identity(ra, ta, frac, tb, beta):
    A = ra * complex(math.cos(ta), math.sin(ta))
    B = frac * ra * complex(math.cos(tb), math.sin(tb))
    got = float(taylor_split(A, B, beta))
    assert got == pytest.approx(abs(A + B) ** -beta - abs(A) ** -beta, abs=1e-10)


def test_taylor_split_radius():
    with pytest.raises(TaylorRadiusError):
        taylor_split(1.0, 1.0, 0.5)


@given(st.floats(-0.9, 5.0), st.floats(0.05, 0.95))
def test_phi_beta(x, beta):
    if abs(x) < 1e-12:
        assert float(phi_beta(x, beta)) == pytest.approx(-beta / 2)
    else:
        assert float(phi_beta(x, beta)) == pytest.approx(((1 + x) ** (-beta / 2) - 1) / x, rel=1e-9, abs=1e-14)


def test_phi_beta_continuous_at_switch():
    for x in (-1.0001e-6, -0.9999e-6, 0.9999e-6, 1.0001e-6):
        direct = np.expm1(-0.25 * np.log1p(x)) / x
        assert float(phi_beta(x, 0.5)) == pytest.approx(direct, abs=1e-10)


@pytest.mark.parametrize("beta", [0.25, 0.5, 0.75])
def test_circle_kernel_integral_at_every_node(beta):
    g = make_grid(64)
    val = singular_integral(np.ones((64, 64)), np.ones(64), g, beta)
    kappa = circle_kernel_constant(beta)
    assert kappa == pytest.approx(circle_kernel_integral(beta), rel=1e-14)
    assert np.allclose(val, 1j * kappa * g.w, atol=1e-13)
    # Re[w conj(oint)] = 0: the integral is a purely rotational multiple of w
    assert np.max(np.abs(np.real(g.w * np.conj(val)))) < 1e-13


@pytest.mark.parametrize("N", range(2, 7))
@pytest.mark.parametrize("beta", [0.25, 0.5, 0.75])
@pytest.mark.parametrize("l", [0.5, 1.0])
def test_trivial_root(N, beta, l):
    m = PolygonModel(N, l, "sqg", beta)
    t = j_sqg(0.0, ZERO, m, GRID)
    om = omega_sqg(N, l, beta)
    for part in (t.J1, t.J2, t.J4):
        assert np.max(np.abs(part)) == 0.0
    assert np.max(np.abs(np.conj(t.J3) + 1j * om * l)) < 1e-13 * max(1.0, abs(om))
    assert np.max(np.abs(f_sqg(om, 0.0, ZERO, m, GRID))) < 5e-11


def test_j3_at_zero_eps_ignores_shape(rng):
    m = PolygonModel(4, 1.0, "sqg", 0.5)
    f = FourierShape(random_shape_coeffs(rng, 6))
    t = j_sqg(0.0, f, m, GRID)
    assert np.max(np.abs(np.conj(t.J3) + 1j * omega_sqg(4, 1.0, 0.5))) < 1e-13


@pytest.mark.parametrize("quad", ["spectral", "subtract"])
def test_j_matches_direct_velocity(rng, quad):
    # physical-space velocity without the Taylor split; leading self term removed analytically
    beta = 0.5
    m = PolygonModel(3, 1.0, "sqg", beta)
    f = FourierShape(random_shape_coeffs(rng, 5))
    g = make_grid(256)
    for eps in (0.1, 0.3):
        J = j_sqg(eps, f, m, g, quadrature=quad).total
        v = velocity_direct_sqg(eps, f, m, g, quadrature=quad)
        lead = c_beta(beta) / (math.pi * eps ** (1 + beta)) * 1j * circle_kernel_integral(beta) * g.w
        assert np.max(np.abs(v - lead - J)) < 1e-10


def test_gauss_and_exact_t_rules_agree(rng):
    m = PolygonModel(3, 1.0, "sqg", 0.4)
    f = FourierShape(random_shape_coeffs(rng, 6))
    a = j_sqg(0.2, f, m, GRID)
    b = j_sqg(0.2, f, m, GRID, t_rule="gauss")
    for x, y in zip(a, b):
        assert np.max(np.abs(x - y)) < 1e-13


def test_quadrature_rules_converge_to_spectral(rng):
    m = PolygonModel(3, 1.0, "sqg", 0.5)
    f = FourierShape(random_shape_coeffs(rng, 6))
    ref = j_sqg(0.2, f, m, make_grid(512)).total
    errs = {}
    for q in ("plain", "subtract"):
        e = []
        for M in (64, 128, 256):
            J = j_sqg(0.2, f, m, make_grid(M), quadrature=q).total
            e.append(np.max(np.abs(J - ref[:: 512 // M])))
        errs[q] = e
    # plain trapezoid converges like h^(1-beta), subtraction at least one order faster
    for e1, e2 in zip(errs["plain"], errs["plain"][1:]):
        assert 1.2 < e1 / e2 < 2.0
    for e1, e2 in zip(errs["subtract"], errs["subtract"][1:]):
        assert e1 / e2 > 2.5
    err_spectral = np.max(np.abs(j_sqg(0.2, f, m, make_grid(128)).total - ref[::4]))
    assert err_spectral < 1e-12


def test_j2_mode_map_against_closed_form():
    # at eps = 0 and f = w^-n, J2 = 2i * (C/(2 pi i)) oint f'/|w - xi|^beta; compare with the mode oracle
    beta = 0.5
    m = PolygonModel(2, 1.0, "sqg", beta)
    g = make_grid(512)
    for n in (1, 3, 6):
        a = np.zeros(n)
        a[-1] = 1.0 / (2 * n)
        t = j_sqg(0.0, FourierShape(a), m, g, sigma=0.5, quadrature="subtract")
        q = mode_integrals_quadrature(beta, n)[2] * a[-1]
        got = np.mean(t.J2 * g.w**n) / 2j
        assert got.real == pytest.approx(q, rel=1e-5)


def test_residual_odd_and_closure(rng):
    for _ in range(10):
        beta = rng.uniform(0.1, 0.9)
        m = PolygonModel(int(rng.integers(2, 6)), rng.uniform(0.5, 2.0), "sqg", beta)
        f = FourierShape(random_shape_coeffs(rng, 8))
        eps = rng.uniform(0.0, 0.1)
        ev = evaluate_sqg(eps, f, m, GRID)
        assert np.max(np.abs(ev.F_samples + reflect(ev.F_samples))) < 5e-10
        assert abs(ev.sin_coeffs[0]) < 1e-9
        Jt = ev.J_samples
        assert np.max(np.abs(reflect(Jt) + np.conj(Jt))) < 1e-12


def test_closure_at_zero_eps(rng):
    for _ in range(5):
        beta = rng.uniform(0.1, 0.9)
        m = PolygonModel(int(rng.integers(2, 7)), 1.0, "sqg", beta)
        f = FourierShape(random_shape_coeffs(rng, 8))
        assert omega_closure_sqg(0.0, f, m, GRID) == pytest.approx(omega_sqg(m.N, 1.0, beta), abs=1e-10)


def test_speed_offset_gives_pure_first_mode():
    m = PolygonModel(3, 1.5, "sqg", 0.3)
    F = f_sqg(omega_sqg(3, 1.5, 0.3) + 0.01, 0.0, ZERO, m, GRID)
    assert np.allclose(F, -0.01 * 1.5 * np.sin(GRID.theta), atol=1e-13)


def test_f_tilde_fixture():
    m = PolygonModel(3, 1.0, "sqg", 0.5)
    assert np.max(np.abs(f_tilde_sqg(0.0, ZERO, m, GRID).coeffs)) < 5e-11
    c = f_tilde_sqg(0.02, ZERO, m, make_grid(256)).coeffs
    assert np.all(np.isfinite(c)) and 0 < np.max(np.abs(c)) < 1e-2


def test_errors():
    m = PolygonModel(3, 1.0, "sqg", 0.5)
    with pytest.raises(ValueError):
        j_sqg(-0.1, ZERO, m, GRID)
    with pytest.raises(ValueError):
        j_sqg(0.1, ZERO, PolygonModel(3, 1.0), GRID)
    with pytest.raises(PatchOverlapError):
        j_sqg(1.0, ZERO, m, GRID)
    with pytest.raises(ValueError):
        j_sqg(0.1, ZERO, m, GRID, quadrature="simpson")
