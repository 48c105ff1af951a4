"""Integer-valued polynomials, prime-indexed matrix families and
multiplicative complexity bounds."""

from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence


def _as_fraction(c) -> Fraction:
    if isinstance(c, str):
        return Fraction(c.strip())
    return Fraction(c)


@dataclass(frozen=True)
class RationalPolynomial:
    """Polynomial with rational coefficients, ascending degree, no trailing zeros."""

    coeffs: tuple

    def __post_init__(self):
        cs = [_as_fraction(c) for c in self.coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs) if cs else (Fraction(0),))

    @property
    def degree(self) -> int:
        if len(self.coeffs) == 1 and self.coeffs[0] == 0:
            return -1
        return len(self.coeffs) - 1

    def __call__(self, t) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    @property
    def common_denominator(self) -> int:
        return math.lcm(*(c.denominator for c in self.coeffs))

    def integer_form(self) -> tuple[list[int], int]:
        """``(g, d)`` with g integer coefficients such that self == g / d."""
        d = self.common_denominator
        return [int(c * d) for c in self.coeffs], d

    @property
    def has_integer_coefficients(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def without_constant(self) -> "RationalPolynomial":
        return RationalPolynomial((Fraction(0),) + self.coeffs[1:])

    def __add__(self, other):
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return RationalPolynomial(
            tuple((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n))
        )

    def scale(self, s) -> "RationalPolynomial":
        return RationalPolynomial(tuple(c * s for c in self.coeffs))

    def __str__(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if i and c == 1:
                terms.append(mono)
            elif i:
                terms.append(f"{c}*{mono}" if c.denominator == 1 else f"({c})*{mono}")
            else:
                terms.append(str(c))
        return " + ".join(terms) if terms else "0"


def finite_differences_at_zero(f: RationalPolynomial) -> list[Fraction]:
    """Forward differences Delta^i f(0) for i = 0..deg f."""
    deg = max(f.degree, 0)
    row = [f(t) for t in range(deg + 1)]
    out = []
    while row:
        out.append(row[0])
        row = [b - a for a, b in zip(row, row[1:])]
    return out


def is_integer_valued(f) -> bool:
    """True iff f(Z) is contained in Z.

    f maps Z to Z exactly when its coordinates in the binomial basis
    C(x, i) are integers, i.e. when every Delta^i f(0) is an integer.
    """
    if not isinstance(f, RationalPolynomial):
        f = RationalPolynomial(tuple(f))
    return all(d.denominator == 1 for d in finite_differences_at_zero(f))


class IntegerValuedPolynomial(RationalPolynomial):
    """A non-constant rational polynomial certified to satisfy f(Z) in Z."""

    def __post_init__(self):
        super().__post_init__()
        if self.degree < 1:
            raise ValueError(f"polynomial {self} is constant")
        if not is_integer_valued(self):
            raise ValueError(f"polynomial {self} is not integer-valued")


def eval_at_integer(f: RationalPolynomial, t: int) -> int:
    value = f(int(t))
    if value.denominator != 1:
        raise ArithmeticError(f"{f} at {t} gives non-integer {value}")
    return value.numerator


def rank_over_q(rows: Sequence[Sequence]) -> int:
    """Rank of a rational matrix by exact Gaussian elimination."""
    mat = [[Fraction(v) for v in r] for r in rows]
    if not mat:
        return 0
    ncols = max(len(r) for r in mat)
    mat = [r + [Fraction(0)] * (ncols - len(r)) for r in mat]
    rank = 0
    for col in range(ncols):
        pivot = next((i for i in range(rank, len(mat)) if mat[i][col] != 0), None)
        if pivot is None:
            continue
        mat[rank], mat[pivot] = mat[pivot], mat[rank]
        pv = mat[rank][col]
        for i in range(rank + 1, len(mat)):
            if mat[i][col] != 0:
                factor = mat[i][col] / pv
                mat[i] = [a - factor * b for a, b in zip(mat[i], mat[rank])]
        rank += 1
        if rank == len(mat):
            break
    return rank


def linearly_independent(polys: Sequence[RationalPolynomial]) -> bool:
    """Linear independence over Z (equivalently over Q) of coefficient vectors."""
    return rank_over_q([p.coeffs for p in polys]) == len(polys)


class Mode(str, enum.Enum):
    INDEPENDENT = "independent"
    SINGLE = "single"


@dataclass(frozen=True)
class MatrixFamily:
    """An n x m grid of polynomials evaluated at primes.

    In ``independent`` mode every entry gets its own prime; in ``single``
    mode one prime p is shared by all entries.
    """

    entries: tuple  # n rows of m RationalPolynomial
    mode: Mode = Mode.INDEPENDENT

    def __post_init__(self):
        rows = tuple(
            tuple(e if isinstance(e, RationalPolynomial) else RationalPolynomial(tuple(e)) for e in row)
            for row in self.entries
        )
        if not rows or not rows[0] or any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("family entries must form a non-empty rectangular grid")
        object.__setattr__(self, "entries", rows)
        object.__setattr__(self, "mode", Mode(self.mode))

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def m(self) -> int:
        return len(self.entries[0])

    @property
    def L(self) -> int:
        return max(e.degree for row in self.entries for e in row)

    def flat(self) -> list[RationalPolynomial]:
        return [e for row in self.entries for e in row]


@dataclass
class FamilyReport:
    valid: bool
    failures: list = field(default_factory=list)

    def __bool__(self):
        return self.valid


def check_family(fam: MatrixFamily) -> FamilyReport:
    """Check the hypotheses a family must satisfy; failures are named."""
    failures = []
    for i, row in enumerate(fam.entries):
        for j, f in enumerate(row):
            if f.degree < 1:
                failures.append(f"non_constant[{i},{j}]")
            if not is_integer_valued(f):
                failures.append(f"integer_valued[{i},{j}]")
            if fam.mode is Mode.SINGLE and not f.has_integer_coefficients:
                failures.append(f"integer_coefficients[{i},{j}]")
    if fam.mode is Mode.SINGLE:
        one = RationalPolynomial((1,))
        if not linearly_independent([one] + fam.flat()):
            failures.append("linear_independence")
    return FamilyReport(not failures, failures)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24, trial division below 1000."""
    n = int(n)
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for p in small:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def instantiate(fam: MatrixFamily, primes) -> list[list[int]]:
    """Integer matrix of the family at a prime assignment.

    ``primes`` is an n x m grid (independent mode) or a single prime.
    """
    report = check_family(fam)
    if not report:
        raise ValueError(f"invalid family: {', '.join(report.failures)}")
    if fam.mode is Mode.SINGLE:
        if not isinstance(primes, int) or isinstance(primes, bool):
            raise ValueError("single-prime family takes one prime")
        grid = [[primes] * fam.m for _ in range(fam.n)]
    else:
        grid = [list(r) for r in primes]
        if len(grid) != fam.n or any(len(r) != fam.m for r in grid):
            raise ValueError(f"independent family needs a {fam.n}x{fam.m} grid of primes")
    for row in grid:
        for p in row:
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")
    return [[eval_at_integer(f, p) for f, p in zip(frow, prow)] for frow, prow in zip(fam.entries, grid)]


@dataclass(frozen=True)
class MultComplexityBound:
    Q: int
    frequency_bound: int
    matrix_norm: int


def matrix_norm(fam: MatrixFamily) -> int:
    """Largest absolute coefficient of M(x) - M(0) over all entries."""
    return max(abs(c) for f in fam.flat() for c in f.coeffs[1:]) if fam.L >= 1 else 0


def _integer_family(fam: MatrixFamily):
    if not all(f.has_integer_coefficients for f in fam.flat()):
        raise ValueError("multiplicative complexity needs entries in Z[x]")


def row_combination(fam: MatrixFamily, m_vec: Sequence[int]) -> list[RationalPolynomial]:
    """Entries of m_vec^t (M(x) - M(0)), one polynomial per column."""
    if len(m_vec) != fam.n:
        raise ValueError(f"m_vec must have length n={fam.n}")
    cols = []
    for j in range(fam.m):
        acc = RationalPolynomial((0,))
        for i in range(fam.n):
            acc = acc + fam.entries[i][j].without_constant().scale(int(m_vec[i]))
        cols.append(acc)
    return cols


def mult_complexity_bound(fam: MatrixFamily, m_vec: Sequence[int]) -> MultComplexityBound:
    """Q = m! (n * ||M(x) - M(0)|| * ||m_vec||_inf)^m."""
    _integer_family(fam)
    if not any(m_vec):
        raise ValueError("m_vec must be nonzero")
    cols = row_combination(fam, m_vec)
    if any(c.degree < 0 for c in cols) or not linearly_independent(cols):
        raise ValueError("entries of m_vec^t (M(x) - M(0)) are linearly dependent")
    norm = matrix_norm(fam)
    freq = max(abs(int(v)) for v in m_vec)
    Q = math.factorial(fam.m) * (fam.n * norm * freq) ** fam.m
    return MultComplexityBound(Q=Q, frequency_bound=freq, matrix_norm=norm)


def mult_complexity_witness_check(
    fam: MatrixFamily,
    m_vec: Sequence[int],
    trials: int,
    seed: int = 0,
    q_max: int = 10**6,
    a_max: int = 10**6,
) -> bool:
    """Brute-force check of the gcd condition behind a complexity bound Q.

    Draws (a, q) with gcd(a_1, ..., a_m, q) = 1 and verifies that the
    non-constant coefficients b_j of sum_i a_i P_i(x) satisfy
    gcd(b_1, ..., b_L, q) <= Q.
    """
    bound = mult_complexity_bound(fam, m_vec).Q
    cols = row_combination(fam, m_vec)
    L = max(c.degree for c in cols)
    coeff_rows = [[int(c.coeffs[d]) if d < len(c.coeffs) else 0 for d in range(1, L + 1)] for c in cols]
    rng = random.Random(seed)
    done = 0
    while done < trials:
        q = rng.randint(1, q_max)
        # small a values make shared factors with q likely
        span = a_max if rng.random() < 0.5 else 12
        a = [rng.randint(-span, span) for _ in cols]
        if math.gcd(*a, q) != 1:
            continue
        done += 1
        b = [sum(ai * row[d] for ai, row in zip(a, coeff_rows)) for d in range(L)]
        if math.gcd(*b, q) > bound:
            return False
    return True
