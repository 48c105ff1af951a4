import math
from fractions import Fraction as F
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from glasner.paircounts import (
    PairCountProfile,
    lemma4_sum,
    min_denominator,
    profile,
    translate,
    verify_Hb_bound,
)
from glasner.search import generate_adversarial
from glasner.torus import ExactTorusPoint, FloatTorusPoint, PointSet


def pts(*rows):
    return PointSet(ExactTorusPoint(tuple(F(c) for c in r)) for r in rows)


def naive_profile(S):
    """Least b with b*(x - y) integral, found by counting up."""
    h = {}
    for x, y in combinations(S.points, 2):
        b = 1
        while any((b * (a - c)).denominator != 1 for a, c in zip(x.coords, y.coords)):
            b += 1
        h[b] = h.get(b, 0) + 1
    return h


def test_min_denominator_examples():
    assert min_denominator(ExactTorusPoint((0,)), ExactTorusPoint((F(1, 3),))) == 3
    assert min_denominator(ExactTorusPoint((F(1, 3),)), ExactTorusPoint((F(1, 2),))) == 6
    assert min_denominator(ExactTorusPoint((F(1, 2), F(1, 3))), ExactTorusPoint((0, 0))) == 6
    with pytest.raises(ValueError):
        min_denominator(ExactTorusPoint((0,)), ExactTorusPoint((0, 0)))


def test_profile_examples():
    p = profile(pts((0,), (F(1, 3),), (F(1, 2),)))
    assert p.h == {2: 1, 3: 1, 6: 1} and p.h1 == 0
    assert profile(pts((F(1, 5),))).h == {}
    with pytest.raises(TypeError):
        profile(PointSet([FloatTorusPoint((0.0,)), FloatTorusPoint((2**-0.5,))]))


def test_Hb_examples():
    p = profile(pts((0,), (F(1, 3),), (F(1, 2),)))
    assert p.H(6) == 3 and verify_Hb_bound(p)
    assert verify_Hb_bound(profile(pts((0,))))
    grid = profile(pts(*[(F(i, 10),) for i in range(10)]))
    assert verify_Hb_bound(grid) and grid.total_pairs == 45


def test_lemma4_examples():
    assert lemma4_sum(PairCountProfile({}, 1, 1), 1, 1, 0.5, 1) == 0
    assert lemma4_sum(PairCountProfile({2: 1}, 2, 1), 1, 1, 0.5, 1) == pytest.approx(2**-0.5, abs=1e-15)
    with pytest.raises(ValueError):
        lemma4_sum(PairCountProfile({2: 1}, 2, 1), 1, 1, 1.0, 1)


@pytest.mark.parametrize("m, D, seed", [(1, 50, 0), (2, 12, 1), (1, 10**6, 2), (3, 7, 3)])
def test_profile_matches_naive(m, D, seed):
    S = generate_adversarial("random", 40, m, {"D": D}, seed=seed)
    p = profile(S)
    want = naive_profile(S) if D < 100 else None
    if want is not None:
        assert {**p.h, **({1: p.h1} if p.h1 else {})} == want
    assert p.total_pairs == 40 * 39 // 2
    assert all(b == math.lcm(*((a - c).denominator for a, c in zip(x.coords, y.coords))) for x, y, b in
               [(x, y, min_denominator(x, y)) for x, y in combinations(S.points[:8], 2)])


def test_big_denominators_take_exact_path():
    S = pts((F(1, 2**40),), (F(1, 3**30),), (0,))
    assert profile(S).h == {2**40: 1, 3**30: 1, 2**40 * 3**30: 1}


rational = st.fractions(min_value=0, max_value=1, max_denominator=30).filter(lambda q: q < 1)


@given(st.lists(st.tuples(rational, rational), min_size=2, max_size=12, unique=True), st.tuples(rational, rational))
@settings(max_examples=60, deadline=None)
def test_translation_invariance(rows, v):
    S = pts(*rows)
    p, q = profile(S), profile(translate(S, v))
    assert p.h == q.h and p.h1 == q.h1 == 0
    rows_ = p.cumulative()
    assert all(a[2] <= b[2] for a, b in zip(rows_, rows_[1:]))


@given(st.lists(rational, min_size=2, max_size=15, unique=True), st.floats(0.1, 3), st.floats(0.1, 3),
       st.integers(1, 40), st.integers(1, 40), st.floats(0.05, 0.95), st.floats(0.05, 0.95), st.integers(1, 3))
@settings(max_examples=60, deadline=None)
def test_lemma4_monotone(xs, c1, c2, T1, T2, r1, r2, n):
    p = profile(pts(*[(x,) for x in xs]))
    c_lo, c_hi = sorted((c1, c2))
    T_lo, T_hi = sorted((T1, T2))
    r_lo, r_hi = sorted((r1, r2))
    base = lemma4_sum(p, c_lo, T_lo, r_hi, n)
    assert base <= lemma4_sum(p, c_hi, T_lo, r_hi, n) * (1 + 1e-12)
    assert base <= lemma4_sum(p, c_lo, T_hi, r_hi, n) * (1 + 1e-12)
    assert base <= lemma4_sum(p, c_lo, T_lo, r_lo, n) * (1 + 1e-12)


# C fitted on seeds 0..9, k in {50, 100, 200}, D = ceil(2 k^(1/m)), with c=1, T=10, r=0.4, n=1
FROZEN_C = {1: 0.06395896114424143, 2: 0.0811783804719638}


@pytest.mark.parametrize("m", [1, 2])
def test_lemma4_frozen_constant(m):
    from glasner.paircounts import lemma4_bound_shape

    for k in (50, 100, 200, 400):
        for s in range(5):
            S = generate_adversarial("random", k, m, {"D": math.ceil(2 * k ** (1 / m))}, seed=100 + s)
            assert lemma4_sum(profile(S), 1.0, 10, 0.4, 1) <= FROZEN_C[m] * lemma4_bound_shape(k, 10, 0.4, m, 1)
