import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from shintani.cubic_forms import (
    a_mat, act, base_point, compose_dnak, discriminant, is_irreducible,
)
from shintani.enumeration import enumerate_table
from shintani.shapes import (
    associativity_defect, cusp_barrier, fundamental_domain_reduce, moebius, reduce_points,
    ring_multiplication_table, same_point_mod_gamma, shape_point, solution_point,
    solve_group_element, trace_discriminant,
)
from shintani.suites import random_irreducible_forms, shape_consistency

HEX = complex(-0.5, math.sqrt(3) / 2)
coeff = st.integers(-25, 25)
forms = st.tuples(coeff, coeff, coeff, coeff)
unimodular = st.sampled_from([((1, 1), (0, 1)), ((1, 0), (1, 1)), ((0, -1), (1, 0)),
                              ((2, 1), (1, 1)), ((3, -2), (-4, 3))])
upper = st.builds(complex, st.floats(-50, 50), st.floats(1e-3, 50))


def exact_moebius(M, tau):
    # rational evaluation; floating point loses digits in C x + D
    (A, B), (C, D) = M
    x, y = Fraction(tau.real), Fraction(tau.imag)
    nr, ni, dr, di = A * x + B, A * y, C * x + D, C * y
    den = dr * dr + di * di
    return complex(float((nr * dr + ni * di) / den), float((ni * dr - nr * di) / den))


def test_ring_table_examples():
    assert trace_discriminant(ring_multiplication_table((1, 0, -1, -1))) == -23
    M = ring_multiplication_table((0, 1, 1, 0))
    assert all(isinstance(v, int) for v in M.ravel())
    assert trace_discriminant(M) == 1


def test_ring_table_associative_and_discriminant():
    rng = np.random.default_rng(3)
    n = 0
    while n < 1000:
        f = tuple(int(v) for v in rng.integers(-20, 21, 4))
        if discriminant(f) == 0:
            continue
        M = ring_multiplication_table(f)
        assert associativity_defect(M) == 0
        assert trace_discriminant(M) == discriminant(f)
        n += 1


@pytest.mark.parametrize("f", [(1, 1, -2, -1), (0, 1, 1, 0)])
def test_hexagonal_shapes(f):
    assert abs(shape_point(f).tau - HEX) < 1e-6


@given(forms, unimodular)
def test_shape_class_invariance(f, g):
    assume(discriminant(f) != 0)
    p, q = shape_point(f).tau, shape_point(act(g, f)).tau
    assert same_point_mod_gamma(p, q, 1e-9)


def test_fundamental_domain_examples():
    p, M = fundamental_domain_reduce(1j)
    assert p.tau == 1j and M == ((1, 0), (0, 1))
    tau = complex(5.3, 0.001)
    p, M = fundamental_domain_reduce(tau)
    assert p.y > tau.imag
    assert abs(exact_moebius(M, tau) - p.tau) < 1e-12


@given(upper)
def test_fundamental_domain_properties(tau):
    p, M = fundamental_domain_reduce(tau)
    assert abs(p.x) <= 0.5 + 1e-12 and abs(p.tau) >= 1 - 1e-9
    (A, B), (C, D) = M
    assert A * D - B * C == 1
    assert abs(exact_moebius(M, tau) - p.tau) <= 1e-9 * max(1.0, abs(p.tau))
    assert abs(reduce_points(np.array([tau]))[0] - p.tau) <= 1e-9 * max(1.0, abs(p.tau))


def test_solve_trivial_examples():
    s = solve_group_element(base_point(-1), -1)
    assert np.allclose((s.lam, s.u, s.t, s.theta), (1, 0, 1, 0), atol=1e-10)
    s = solve_group_element(act(a_mat(2.0), base_point(-1)), -1)
    assert np.allclose((s.lam, s.u, s.t, s.theta), (1, 0, 2, 0), atol=1e-10)


@given(st.floats(0.5, 2), st.floats(-1, 1), st.floats(0.4, 2.5), st.floats(0, 0.99), st.sampled_from([-1, 1]))
def test_solve_recovers_parameters(lam, u, t, theta, sign):
    x = act(compose_dnak(lam, u, t, theta), base_point(sign))
    s = solve_group_element(x, sign)
    assert s.residual <= 1e-10 * max(1.0, np.abs(x).max())
    assert s.lam == pytest.approx(lam, rel=1e-10)
    assert s.lam == pytest.approx(abs(discriminant(x)) ** (1 / 12), rel=1e-9)
    assert (s.u, s.t) == pytest.approx((u, t), abs=1e-8)
    # the leading coefficient in terms of (lam, t, theta)
    if sign < 0:
        a = s.lam ** 3 * s.t ** 3 * math.sin(2 * math.pi * s.theta) / math.sqrt(2)
        assert a == pytest.approx(x[0], abs=1e-9 * max(1.0, np.abs(x).max()))
    assert np.allclose(act(s.matrix(), base_point(sign)), x, atol=1e-9 * max(1.0, np.abs(x).max()))


@given(st.floats(0.1, 10), forms)
def test_homothety_changes_only_lambda(mu, f):
    assume(discriminant(f) != 0)
    sign = 1 if discriminant(f) > 0 else -1
    s1 = solve_group_element(np.array(f, float), sign)
    s2 = solve_group_element(mu * np.array(f, float), sign)
    assert s2.lam == pytest.approx(s1.lam * mu ** (1 / 3), rel=1e-10)
    assert np.allclose((s1.u, s1.t), (s2.u, s2.t), atol=1e-10 * max(1, abs(s1.u), s1.t))
    period = 1 / 3 if sign > 0 else 1
    d = abs(s1.theta - s2.theta)
    assert min(d, period - d) <= 1e-10


def test_shape_consistency_sample():
    worst = max(shape_consistency(f) for f in random_irreducible_forms(200, seed=5))
    assert worst <= 1e-6


def test_solution_point_matches_lattice_shape():
    f = (1, 0, -1, -1)
    s = solve_group_element(f, -1)
    p = fundamental_domain_reduce(solution_point(s, -1))[0].tau
    assert same_point_mod_gamma(p, shape_point(f).tau, 1e-9)


def test_cusp_barrier_small_range():
    for sign in (-1, 1):
        t = enumerate_table(sign, 2000)
        for f, d in zip(t.reps, t.disc):
            if f[0] != 0:
                s = solve_group_element(tuple(int(v) for v in f), sign)
                assert s.t >= cusp_barrier(int(d), sign) * (1 - 1e-9)


def test_singular_input_rejected():
    with pytest.raises(ValueError):
        shape_point((0, 0, 1, 0))
    with pytest.raises(ValueError):
        solve_group_element((1, 0, -1, -1), 1)
