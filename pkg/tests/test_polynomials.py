import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from glasner.polynomials import (
    IntegerValuedPolynomial,
    MatrixFamily,
    Mode,
    RationalPolynomial,
    check_family,
    eval_at_integer,
    instantiate,
    is_integer_valued,
    is_prime,
    mult_complexity_bound,
    mult_complexity_witness_check,
    rank_over_q,
)

TRI = RationalPolynomial((0, F(1, 2), F(1, 2)))  # x(x+1)/2


def test_eval_examples():
    assert eval_at_integer(TRI, 5) == 15
    assert eval_at_integer(RationalPolynomial((0, 0, 1)), 3) == 9
    with pytest.raises(ArithmeticError):
        eval_at_integer(RationalPolynomial((0, F(1, 2))), 1)


@pytest.mark.parametrize("coeffs, ok", [((0, F(1, 2), F(1, 2)), True), ((0, F(1, 2)), False), ((7, 0, 3), True)])
def test_is_integer_valued(coeffs, ok):
    assert is_integer_valued(RationalPolynomial(coeffs)) is ok


def binomial(d):
    """C(x, d) as a rational polynomial."""
    coeffs = [F(1)]
    for i in range(d):
        # multiply by (x - i)
        coeffs = [F(0)] + coeffs
        coeffs = [c - i * (coeffs[j + 1] if j + 1 < len(coeffs) else 0) for j, c in enumerate(coeffs)]
    return RationalPolynomial(tuple(c / math.factorial(d) for c in coeffs))


@pytest.mark.parametrize("d", range(1, 7))
def test_binomial_polynomials(d):
    c = binomial(d)
    assert [c(t) for t in range(d + 3)] == [math.comb(t, d) for t in range(d + 3)]
    assert is_integer_valued(c)
    assert not is_integer_valued(c.scale(F(1, 2)))


def test_integer_valued_type():
    IntegerValuedPolynomial((0, F(1, 2), F(1, 2)))
    with pytest.raises(ValueError):
        IntegerValuedPolynomial((5,))
    with pytest.raises(ValueError):
        IntegerValuedPolynomial((0, F(1, 2)))


def fam(grid, mode=Mode.INDEPENDENT):
    return MatrixFamily(tuple(tuple(RationalPolynomial(tuple(e)) for e in row) for row in grid), mode)


def test_check_family_examples():
    assert check_family(fam([[(0, 1), (0, 0, 1)]], Mode.SINGLE))
    bad = check_family(fam([[(0, 1), (1, 1)]], Mode.SINGLE))
    assert not bad and bad.failures == ["linear_independence"]
    bad = check_family(fam([[(0, F(1, 2), F(1, 2))]], Mode.SINGLE))
    assert bad.failures == ["integer_coefficients[0,0]"]
    assert check_family(fam([[(0, F(1, 2), F(1, 2))]]))


ACCEPTED = [
    fam([[(0, 1)]]),
    fam([[(0, 1), (0, 0, 1)], [(0, 2), (0, F(1, 2), F(1, 2))]]),
    fam([[(0, 1)], [(0, 0, 1)]], Mode.SINGLE),
]


@pytest.mark.parametrize("f", ACCEPTED)
def test_single_hypothesis_mutations_rejected(f):
    assert check_family(f)
    grid = [[e.coeffs for e in row] for row in f.entries]
    # constant entry
    g = [list(r) for r in grid]
    g[0][0] = (3,)
    assert "non_constant[0,0]" in check_family(fam(g, f.mode)).failures
    # non integer-valued entry
    g = [list(r) for r in grid]
    g[0][0] = (0, F(1, 3))
    assert "integer_valued[0,0]" in check_family(fam(g, f.mode)).failures
    if f.mode is Mode.SINGLE:
        g = [list(r) for r in grid]
        g[-1][-1] = grid[0][0]
        assert check_family(fam(g, f.mode)).failures == ["linear_independence"]


def test_instantiate_examples():
    assert instantiate(fam([[(0, 0, 1)]]), [[3]]) == [[9]]
    assert instantiate(fam([[(0, 1)], [(0, 0, 1)]], Mode.SINGLE), 2) == [[2], [4]]
    assert instantiate(fam([[(0, 1), (0, 1)]]), [[2, 5]]) == [[2, 5]]
    with pytest.raises(ValueError):
        instantiate(fam([[(0, 1)]]), [[4]])
    with pytest.raises(ValueError):
        instantiate(fam([[(0, 1)]], Mode.SINGLE), [[2]])


def test_is_prime_against_trial_division():
    naive = [n for n in range(2000) if n > 1 and all(n % d for d in range(2, math.isqrt(n) + 1))]
    assert [n for n in range(2000) if is_prime(n)] == naive
    assert is_prime(2**61 - 1) and not is_prime(3215031751)


def test_rank():
    assert rank_over_q([[1, 0], [0, 1], [1, 1]]) == 2
    assert rank_over_q([[F(1, 2), 1], [1, 2]]) == 1


def test_mult_complexity_examples():
    assert mult_complexity_bound(fam([[(0, 1)]]), [1]).Q == 1
    b = mult_complexity_bound(fam([[(0, 1), (0, 0, 1)]]), [1])
    assert (b.Q, b.matrix_norm, b.frequency_bound) == (2, 1, 1)
    assert mult_complexity_bound(fam([[(0, 1), (0, 0, 1)]]), [2]).Q == 2 * 2**2


def test_mult_complexity_dependent_rejected():
    with pytest.raises(ValueError):
        mult_complexity_bound(fam([[(0, 1), (0, 2)]]), [1])


@given(st.integers(1, 50), st.integers(1, 50))
@settings(max_examples=40, deadline=None)
def test_Q_monotone(a, b):
    f = fam([[(0, 1), (0, 0, 1)]])
    lo, hi = sorted((a, b))
    assert mult_complexity_bound(f, [lo]).Q <= mult_complexity_bound(f, [hi]).Q
    g = fam([[(0, 1), (0, 0, hi)]])
    h = fam([[(0, 1), (0, 0, lo)]])
    assert mult_complexity_bound(h, [1]).Q <= mult_complexity_bound(g, [1]).Q


def test_witness_check_small():
    assert mult_complexity_witness_check(fam([[(0, 1), (0, 0, 1)]]), [1], 500, seed=3)


@given(st.sampled_from([(0, F(1, 2), F(1, 2)), (0, 1, 3), (2, F(-1, 6), 0, F(1, 6))]),
       st.integers(-200, 200), st.integers(1, 40))
@settings(max_examples=100, deadline=None)
def test_periodicity_mod_b(coeffs, t, b):
    f = RationalPolynomial(coeffs)
    shift = b * math.factorial(f.degree)
    assert (eval_at_integer(f, t) - eval_at_integer(f, t + shift)) % b == 0
