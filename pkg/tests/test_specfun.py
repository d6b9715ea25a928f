import cmath
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from shintani.specfun import (
    bessel_k, bessel_k_array, check_mellin_identities, divisor_eta, divisor_eta_table, f_D,
    gamma, mellin_fD, xi, zeta,
)

mp.mp.dps = 30
rng = np.random.default_rng(11)


def test_gamma_examples():
    assert gamma(0.5).value == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    assert gamma(5).value == pytest.approx(24, rel=1e-14)
    assert gamma(1 / 3).value == pytest.approx(complex(mp.gamma(mp.mpf(1) / 3)), rel=1e-13)
    with pytest.raises(ValueError):
        gamma(-2)


def test_gamma_against_mpmath():
    for _ in range(1000):
        z = complex(rng.uniform(-30, 60), rng.uniform(-60, 60))
        r = gamma(z)
        ref = complex(mp.gamma(mp.mpc(z)))
        assert abs(r.value - ref) <= max(r.abs_error_bound, 1e-300)
        assert abs(r.value - ref) <= 1e-12 * abs(ref)


def test_zeta_examples():
    assert zeta(0).value == -0.5 and zeta(-2).value == 0
    assert zeta(-1).value == pytest.approx(-1 / 12, rel=1e-14)
    assert zeta(2).value == pytest.approx(math.pi ** 2 / 6, rel=1e-14)
    assert zeta(3).value == pytest.approx(float(mp.zeta(3)), rel=1e-13)
    with pytest.raises(ValueError):
        zeta(1)


def test_zeta_against_mpmath():
    for _ in range(1000):
        s = complex(rng.uniform(-10, 10), rng.uniform(-100, 100))
        r = zeta(s)
        ref = complex(mp.zeta(mp.mpc(s)))
        assert abs(r.value - ref) <= r.abs_error_bound + 1e-300
        assert abs(r.value - ref) <= 1e-10 * abs(ref)


@given(st.floats(-20, 20), st.floats(-80, 80))
def test_zeta_conjugate_symmetry(x, y):
    if complex(x, y) == 1:
        return
    assert abs(zeta(complex(x, -y)).value - zeta(complex(x, y)).value.conjugate()) <= 1e-9 * abs(zeta(complex(x, y)).value)


def test_xi_examples():
    assert xi(2).value == pytest.approx(math.pi / 6, rel=1e-14)
    for g in (0.5, 1, 3):
        assert abs(xi(1j * g).value / xi(1 + 1j * g).value) == pytest.approx(1, abs=1e-12)


def test_xi_functional_equation():
    for _ in range(100):
        z = complex(rng.uniform(-8, 9), rng.uniform(-40, 40))
        a, b = xi(z).value, xi(1 - z).value
        assert abs(a - b) <= 1e-9
        assert abs(a - b) <= 1e-9 * abs(a)


def test_bessel_examples():
    assert bessel_k(0.5, 2.0).value == pytest.approx(math.sqrt(math.pi / 4) * math.exp(-2), abs=1e-14)
    assert bessel_k(0, 2.0).value == pytest.approx(float(mp.besselk(0, 2)), abs=1e-14)
    assert abs(bessel_k(1j, 1.0).value.imag) <= 1e-12


def test_bessel_against_mpmath():
    for _ in range(300):
        nu = 1j * rng.uniform(0, 50) if rng.random() < 0.7 else rng.uniform(0, 10)
        x = float(np.exp(rng.uniform(np.log(1e-3), np.log(60))))
        r = bessel_k(nu, x)
        ref = complex(mp.besselk(mp.mpc(nu), x))
        # absolute accuracy for imaginary order (|K| <= K_0); relative for real order
        assert abs(r.value - ref) <= 1e-12 * (1 if isinstance(nu, complex) else max(1, abs(ref)))
        assert abs(r.value - ref) <= r.abs_error_bound + 1e-300


def test_bessel_real_order_positive_and_decreasing():
    x = np.linspace(0.01, 30, 400)
    for nu in (0.0, 0.5, 2.0, 7.5):
        k = bessel_k_array(nu, x).real
        assert np.all(k > 0) and np.all(np.diff(k) < 0)


def test_divisor_eta_examples():
    z = 1j
    assert divisor_eta(z, 1) == 1
    assert divisor_eta(z, 2) == pytest.approx(2 * math.cos(0.5 * math.log(2)), abs=1e-15)
    assert divisor_eta(z, 4) * divisor_eta(z, 9) == pytest.approx(divisor_eta(z, 36), abs=1e-13)
    table = divisor_eta_table(z, 50)
    assert all(abs(table[m] - divisor_eta(z, m)) < 1e-13 for m in range(1, 51))


@given(st.floats(-5, 5), st.integers(1, 60), st.integers(1, 60))
def test_divisor_eta_multiplicative(g, m, n):
    if math.gcd(m, n) != 1:
        return
    z = 1j * g
    assert divisor_eta(z, m) * divisor_eta(z, n) == pytest.approx(divisor_eta(z, m * n), abs=1e-12)


def test_f_D_support_and_smoothness():
    x = np.linspace(0, 3, 3001)
    v = f_D(x)
    assert np.all(v >= 0) and np.all(v[(x <= 1) | (x >= 2)] == 0)
    # one-sided difference quotients at both endpoints vanish
    for eps in (1e-2, 1e-3):
        assert f_D(1 + eps) / eps < 1e-40 and f_D(2 - eps) / eps < 1e-40


def test_mellin_fD():
    ref = mp.quad(lambda x: mp.exp(-1 / ((x - 1) * (2 - x))), [1, 1.5, 2])
    r = mellin_fD(1)
    assert abs(r.value - float(ref)) <= max(r.abs_error_bound, 1e-15)
    for s in (0.5 + 2j, -3 + 1j, 4.0, 2 - 7j):
        r = mellin_fD(s)
        ref = complex(mp.quad(lambda x: mp.exp(-1 / ((x - 1) * (2 - x))) * x ** (mp.mpc(s) - 1), [1, 1.5, 2]))
        assert abs(r.value - ref) <= 1e-12
        s = complex(s)
        bound = 2 ** max(s.real - 1, 0) * abs(mellin_fD(1).value)
        assert abs(r.value) <= bound * (1 + 1e-12)


def test_mellin_fD_entire():
    # Cauchy integral of an entire function around a small circle returns the centre value
    c, rad, n = 0.7 + 0.3j, 0.2, 32
    pts = c + rad * np.exp(2j * np.pi * np.arange(n) / n)
    avg = np.mean([mellin_fD(p).value for p in pts])
    assert abs(avg - mellin_fD(c).value) <= 1e-12


def test_mellin_identities():
    rows = check_mellin_identities()
    assert {r["identity"] for r in rows} == {"bessel", "gauss", "cos"}
    for r in rows:
        assert r["rel_err"] <= r["tol"], r
    tols = {r["identity"]: r["tol"] for r in rows}
    assert tols == {"bessel": 1e-8, "gauss": 1e-10, "cos": 1e-6}
