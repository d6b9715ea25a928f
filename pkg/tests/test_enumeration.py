import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from shintani.cubic_forms import act, discriminant, is_irreducible, mat_mul
from shintani.enumeration import (
    act_borel, canonical_reduce, check_singular_bijection, classify_singular_dual,
    classify_singular_quadratic, compare_with_oracle, enumerate_classes, enumerate_oracle,
    enumerate_table, form_class, reduce_reducible, stabilizer_order,
)

GENS = [((1, 1), (0, 1)), ((1, 0), (1, 1)), ((0, -1), (1, 0)), ((1, -1), (0, 1)), ((1, 0), (-1, 1))]
words = st.lists(st.sampled_from(GENS), max_size=6)


def _word(ws):
    g = ((1, 0), (0, 1))
    for h in ws:
        g = mat_mul(g, h)
    return g


def test_canonical_reduce_idempotent_and_witness():
    for f in [(1, 0, -1, -1), (1, 1, -2, -1), (2, 3, -5, 7), (3, -1, 4, 2)]:
        rep, g = canonical_reduce(f)
        assert act(g, f) == rep
        assert canonical_reduce(rep)[0] == rep


@given(words)
def test_canonical_reduce_orbit_invariance(ws):
    f = (1, 0, -1, -1)
    assert canonical_reduce(act(_word(ws), f))[0] == canonical_reduce(f)[0]


@given(words, st.sampled_from([(1, 1, -2, -1), (2, -1, 3, 5), (1, 2, 3, -4)]))
def test_canonical_reduce_separates_only_classes(ws, f):
    assert canonical_reduce(act(_word(ws), f))[0] == canonical_reduce(f)[0]


@pytest.mark.parametrize("f, n", [((1, 0, -1, -1), 1), ((1, 1, -2, -1), 3), ((0, 1, 1, 0), 3),
                                  ((0, 1, 1, 6), 1)])
def test_stabilizer_order_examples(f, n):
    assert stabilizer_order(f) == n


def test_reduce_reducible_examples():
    assert [tuple(r) for r in reduce_reducible((0, 1, 1, 6))] == [(0, 1, 1, 6)]
    assert len(reduce_reducible((0, 1, 1, 0))) == 1
    g = ((2, 1), (5, 3))
    assert [tuple(r) for r in reduce_reducible(act(g, (0, 1, 1, 6)))] == [(0, 1, 1, 6)]


def test_reduce_reducible_one_or_three():
    for f in [(0, 1, 3, 2), (0, 2, 1, -3), (0, 1, 0, -4), (0, 3, 2, 5)]:
        reps = reduce_reducible(f)
        square = form_class(f).square_disc_quadratic
        assert len(reps) == (3 if square and stabilizer_order(f) == 1 else 1)
        for r in reps:
            assert r.a == 0 and 0 <= r.c < 2 * r.b and discriminant(r) == discriminant(f)


def _flip(f):
    # (v, w) -> (-v, w), determinant -1
    a, b, c, d = f
    return (-a, b, -c, d)


@pytest.mark.parametrize("sign, disc, stab", [(-1, -23, 1), (1, 49, 3)])
def test_small_class_lists(sign, disc, stab):
    # one GL2(Z) class, which splits into two SL2(Z) classes exchanged by v -> -v
    cls = [c for c in enumerate_classes(sign, abs(disc), True) if c.disc == disc]
    assert len(cls) == 2
    assert all(is_irreducible(c.rep) and c.stab_order == stab for c in cls)
    assert canonical_reduce(_flip(cls[0].rep))[0] == cls[1].rep
    assert any(c.disc == -4 for c in enumerate_classes(-1, 4))


def test_table_invariants():
    for sign in (-1, 1):
        t = enumerate_table(sign, 3000)
        d = np.array([discriminant(tuple(int(x) for x in r)) for r in t.reps])
        assert np.array_equal(d, t.disc)
        assert np.all(np.sign(t.disc) == sign)
        assert np.all(np.isin(t.stab, (1, 3)))
        if sign < 0:
            assert np.all(t.stab == 1)
        red = ~t.irreducible
        b = t.reps[red, 1]
        assert np.all(t.reps[red, 0] == 0) and np.all(t.disc[red] % (b * b) == 0)
        key = np.column_stack([np.abs(t.disc), t.reps])
        assert all(tuple(key[i]) < tuple(key[i + 1]) for i in range(len(key) - 1))


def test_class_count_grows_linearly():
    n1, n2 = len(enumerate_table(-1, 2000)), len(enumerate_table(-1, 8000))
    assert 3.2 < n2 / n1 < 4.8


def test_irreducible_count_ratio_matches_oracle_trend():
    ratios = []
    for X in (1000, 3000):
        ratios.append(len(enumerate_table(-1, X, True)) / len(enumerate_table(1, X, True)))
        o_neg = sum(c.irreducible for c in enumerate_oracle(-1, X)[0])
        o_pos = sum(c.irreducible for c in enumerate_oracle(1, X)[0])
        assert ratios[-1] == pytest.approx(o_neg / o_pos, rel=1e-12)


@pytest.mark.parametrize("sign", [-1, 1])
def test_oracle_agreement(sign):
    r = compare_with_oracle(sign, 1500)
    assert r["problems"] == [] and r["missing"] == 0 and r["enumerated"] == r["oracle"]


def test_oracle_guard():
    with pytest.raises(ValueError):
        enumerate_oracle(-1, 10 ** 4 + 1)


def test_singular_examples():
    t = classify_singular_dual((0, 0, 0, 5))
    assert (t.component, t.params) == ("TypeI", (5,))
    t = classify_singular_dual((0, 0, 3, 2))
    assert (t.component, t.params) == ("TypeII", (1, 2))
    assert classify_singular_dual((0, 0, 0, 0)).component == "Zero"
    assert classify_singular_quadratic((0, 0, 7)).params == (7,)
    t = classify_singular_quadratic((0, 4, 1))
    assert (t.component, t.params) == ("QII", (2, 1))
    t = classify_singular_quadratic((1, 2, 1))
    assert t.component == "QIII" and t.params == (1, 1, 0)
    assert act_borel(t.witness[0], (1, 0, 0)) == (1, 2, 1)
    with pytest.raises(ValueError):
        classify_singular_dual((1, 0, 0, 1))
    with pytest.raises(ValueError):
        classify_singular_quadratic((1, 2, 3))


def test_singular_bijection_small_box():
    r = check_singular_bijection(20)
    assert r["cubic_errors"] == [] and r["quadratic_errors"] == []
    assert r["cubic_counts"]["Zero"] == 1 and r["quadratic_counts"]["Zero"] == 1
