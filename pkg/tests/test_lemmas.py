import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from shintani import lemmas as L
from shintani.cubic_forms import discriminant_array


def test_orbit_jacobian_is_12_pi():
    for sign in (-1, 1):
        assert L.orbit_jacobian(sign) == pytest.approx(12 * math.pi, rel=1e-8)


def test_first_coefficient_factorisation():
    for sign in (-1, 1):
        assert L.first_coefficient_defect(sign) <= 1e-12


def test_test_function_support():
    rng = np.random.default_rng(0)
    F = rng.uniform(-2, 2, (4000, 4))
    for sign in (-1, 1):
        v = L.test_function(F, sign)
        P = discriminant_array(F)
        inside = (np.sign(P) == sign) & (np.abs(P) > 1) & (np.abs(P) < 2)
        assert np.all(v[~inside] == 0) and np.all(v >= 0) and np.all(np.isfinite(v))


@pytest.mark.parametrize("z", [0, 1j, 0.5])
def test_eigenvalue(z):
    r = L.verify_eigenvalue(z)
    assert r.passed and r.rel_err <= 1e-10


@given(st.floats(0.05, 0.95))
def test_theta_average_closed_form(z):
    for period in (1, 3):
        assert L._theta_integral(z, period) == pytest.approx(L.theta_average(z), rel=1e-10)


@pytest.mark.parametrize("z", [0.25, 0.5, 0.75])
@pytest.mark.parametrize("sign", [-1, 1])
def test_sigma2_corrected_closed_form(z, sign):
    r = L.verify_sigma2(z, sign, corrected=True)
    assert r.passed and r.lemma == "sigma2_corrected"


@pytest.mark.parametrize("z", [0.25, 0.5, 0.75])
def test_sigma2_printed_form_differs_by_theta_average(z):
    # the printed form carries the theta-average at -z
    printed, corrected = L.sigma2_closed_form(z, -1), L.sigma2_closed_form(z, -1, corrected=True)
    flipped = math.gamma((1 + z) / 2) / (math.sqrt(math.pi) * math.gamma(1 + z / 2))
    assert printed / corrected == pytest.approx(flipped / L.theta_average(z), rel=1e-13)
    assert not L.verify_sigma2(z, -1).passed


@pytest.mark.parametrize("z", [0.25, 0.5, 0.75])
def test_sigma2_sign_ratio(z):
    for corrected in (False, True):
        r = L.sigma2_closed_form(z, 1, corrected) / L.sigma2_closed_form(z, -1, corrected)
        assert r == pytest.approx(3 ** (3 * z / 4 - 1), rel=1e-14)
    lhs = L.sigma2_group_integral(z, 1) / L.sigma2_group_integral(z, -1)
    assert lhs == pytest.approx(3 ** (3 * z / 4 - 1), rel=1e-6)


def test_sigma2_against_fourier_transform():
    r = L.verify_sigma2_fourier(0.5, -1)
    assert r.passed


def test_printed_phi0_jacobian_off_by_32():
    rng = np.random.default_rng(1)
    lam, t, u = rng.uniform(0.5, 2, 20), rng.uniform(0.5, 2, 20), rng.uniform(-1, 1, 20)
    for sign in (-1, 1):
        ratio = L.param_jacobian(lam, t, u, sign) / L.printed_phi0_jacobian(lam, t, sign)
        assert np.allclose(ratio, 32, rtol=1e-8)


def test_param_jacobian_against_finite_differences():
    lam, t, u, h = 1.1, 0.8, 0.3, 1e-6
    for sign in (-1, 1):
        J = np.empty((3, 3))
        for j, e in enumerate(np.eye(3) * h):
            yp = L.quadratic_param(lam + e[0], t + e[1], u + e[2], sign)
            ym = L.quadratic_param(lam - e[0], t - e[1], u - e[2], sign)
            J[:, j] = (yp - ym) / (2 * h)
        assert abs(np.linalg.det(J)) == pytest.approx(abs(L.param_jacobian(lam, t, u, sign)), rel=1e-7)


@pytest.mark.parametrize("s", [2.0, 0.0, 1.0])
@pytest.mark.parametrize("sign", [-1, 1])
def test_phi0(s, sign):
    assert L.verify_phi0(s, sign).passed


def test_phi0_ratio():
    for s in (2.0, 0.0, 1.0):
        assert L.verify_phi0_ratio(s).passed


@pytest.mark.slow
def test_phi0_grid_convergence():
    # doubling the nodes per axis changes the integral by less than 10x the reported error
    for s in (0.5, 2.0):
        r0, r1 = L.verify_phi0(s, -1, level=0), L.verify_phi0(s, -1, level=1)
        assert L.rel_err(r0.lhs, r1.lhs) <= max(10 * r0.rel_err, 1e-14)
        assert r1.budget["nodes"] == [193, 321, 193]


def test_report_serialisation():
    r = L.verify_sigma2(0.5, -1, corrected=True)
    d = r.as_dict()
    assert d["passed"] is True and d["lemma"] == "sigma2_corrected" and len(d["lhs"]) == 2
    assert L.rel_err(0, 0) == 0.0
