"""Exponential sums over primes.

Empirical prime averages, their exact limits for rational phases (via
equidistribution of primes in reduced residue classes), complete sums over
units, and the scans built on them.
"""

from __future__ import annotations

import decimal
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from glasner import _kernels
from glasner.polynomials import RationalPolynomial

TWO_PI = 2.0 * math.pi

#: Minimum significant digits for a coefficient declared irrational.
MIN_IRRATIONAL_DIGITS = 30


@dataclass(frozen=True)
class PrimeTable:
    primes: np.ndarray

    @property
    def N(self) -> int:
        return int(self.primes.shape[0])


def _nth_prime_upper_bound(N: int) -> int:
    if N < 6:
        return 13
    ln = math.log(N)
    return int(N * (ln + math.log(ln))) + 1


@lru_cache(maxsize=8)
def _first_primes(N: int) -> np.ndarray:
    limit = _nth_prime_upper_bound(N)
    primes = _kernels.sieve_primes(limit)
    out = np.ascontiguousarray(primes[:N])
    out.setflags(write=False)
    return out


def first_n_primes(N: int) -> PrimeTable:
    if N < 1:
        raise ValueError("N must be at least 1")
    return PrimeTable(_first_primes(int(N)))


@dataclass(frozen=True)
class ExpSumResult:
    value: complex
    N_used: int | str
    modulus_used: int

    def __abs__(self):
        return abs(self.value)


def _exact_scalar(alpha) -> Fraction:
    if isinstance(alpha, str):
        return Fraction(alpha.strip())
    if isinstance(alpha, decimal.Decimal):
        return Fraction(alpha)
    return Fraction(alpha)


def _phase_residues(coeffs: Sequence[Fraction], xs: np.ndarray):
    """Integer residues and modulus with phase(x) = residue / modulus (mod 1).

    ``coeffs`` are the exact phase-polynomial coefficients.
    """
    den = math.lcm(*(c.denominator for c in coeffs))
    ints = [int(c * den) for c in coeffs]
    if den <= _kernels.MAX_MODULUS:
        return _kernels.poly_residues(np.array([v % den for v in ints], dtype=np.int64), xs, den), den
    res = []
    for x in xs.tolist():
        acc = 0
        for c in reversed(ints):
            acc = (acc * x + c) % den
        res.append(acc)
    return res, den


def _sum_phases(residues, modulus: int) -> complex:
    if modulus <= _kernels.MAX_MODULUS:
        return _kernels.phase_sum(residues, modulus, 1)
    # correctly rounded big-int true division, then double trig
    t = np.array([r / modulus for r in residues], dtype=np.float64)
    ang = TWO_PI * t
    return complex(np.cos(ang).sum(), np.sin(ang).sum())


def _phase_coeffs(f: RationalPolynomial, alpha: Fraction, w: int) -> list[Fraction]:
    return [c * alpha * w for c in f.coeffs]


def empirical_prime_exp_sum(f: RationalPolynomial, alpha, w: int, N: int) -> ExpSumResult:
    """(1/N) * sum over the first N primes of exp(2 pi i w f(p) alpha).

    ``alpha`` may be an int, Fraction, float or decimal string; it is turned
    into an exact rational and every phase is reduced mod 1 exactly before
    the trigonometric evaluation.
    """
    primes = first_n_primes(N).primes
    coeffs = _phase_coeffs(f, _exact_scalar(alpha), int(w))
    residues, den = _phase_residues(coeffs, primes)
    return ExpSumResult(_sum_phases(residues, den) / N, int(N), 0)


def _units(modulus: int) -> np.ndarray:
    r = np.arange(1, modulus + 1, dtype=np.int64)
    return r[np.gcd(r, modulus) == 1]


def _residues_mod_b(f: RationalPolynomial, xs: np.ndarray, b: int) -> np.ndarray:
    """f(x) mod b for integer-valued f, computed exactly."""
    if b > _kernels.MAX_MODULUS:
        raise OverflowError(f"denominator {b} exceeds the int64 residue range")
    g, d = f.integer_form()
    big = b * d
    if big <= _kernels.MAX_MODULUS:
        gx = _kernels.poly_residues(np.array([c % big for c in g], dtype=np.int64), xs, big)
        return gx // d
    out = []
    for x in xs.tolist():
        acc = 0
        for c in reversed(g):
            acc = (acc * x + c) % big
        out.append(acc // d)
    return np.array(out, dtype=np.int64)


def limit_period(f: RationalPolynomial, b: int) -> int:
    """Period b * L! of f(r) mod b for integer-valued f of degree L."""
    return b * math.factorial(max(f.degree, 0))


def limit_prime_exp_sum_rational(
    f: RationalPolynomial, a: int, b: int, w: int, period: int | None = None
) -> ExpSumResult:
    """Exact limit of the prime average of exp(2 pi i w f(p) a / b).

    Primes equidistribute over the reduced residues mod M0, and f(r) mod b
    has period M0 = b * L!, so the limit is the mean of the phase over units
    r mod M0.  ``period`` may override M0 with any multiple of b for which
    f(r) mod b is periodic.
    """
    a, b, w = int(a), int(b), int(w)
    if b < 1:
        raise ValueError("b must be positive")
    if math.gcd(a, b) != 1:
        raise ValueError(f"gcd({a}, {b}) != 1")
    M0 = limit_period(f, b) if period is None else int(period)
    if M0 % b:
        raise ValueError("period must be a multiple of b")
    units = _units(M0)
    fr = _residues_mod_b(f, units, b)
    value = _kernels.phase_sum(fr, b, (w * a) % b) / units.shape[0]
    return ExpSumResult(value, "limit", M0)


def lemma3_sum(f: RationalPolynomial, a: int, b: int, T: int, period: int | None = None) -> float:
    """Sum over w = 1..T of |limit of the prime average at frequency w|."""
    if T < 1:
        raise ValueError("T must be at least 1")
    if a % b == 0:
        raise ValueError("a/b must be a nonzero rational mod 1")
    if math.gcd(a, b) != 1:
        raise ValueError(f"gcd({a}, {b}) != 1")
    M0 = limit_period(f, b) if period is None else int(period)
    units = _units(M0)
    fr = _residues_mod_b(f, units, b)
    count = units.shape[0]
    total = 0.0
    for w in range(1, T + 1):
        total += abs(_kernels.phase_sum(fr, b, (w * a) % b)) / count
    return total


def lemma6_complete_sum(P: RationalPolynomial, b: int) -> ExpSumResult:
    """Unnormalised complete sum of exp(2 pi i P(r) / b) over units r mod b."""
    b = int(b)
    if b < 1:
        raise ValueError("b must be positive")
    if not P.has_integer_coefficients:
        raise ValueError("P must have integer coefficients")
    ints = [int(c) for c in P.coeffs]
    if math.gcd(*ints, b) != 1:
        raise ValueError("gcd of the coefficients of P with b must be 1")
    units = _units(b)
    res = _kernels.poly_residues(np.array([c % b for c in ints], dtype=np.int64), units, b)
    return ExpSumResult(_kernels.phase_sum(res, b, 1), "complete", b)


def _is_declared_irrational(c) -> bool:
    if isinstance(c, (str, decimal.Decimal)):
        digits = decimal.Decimal(str(c).strip()).as_tuple().digits
        return len(digits) >= MIN_IRRATIONAL_DIGITS
    return False


def lemma2_convergence_probe(coeffs: Sequence, N_schedule: Sequence[int]) -> list[float]:
    """|(1/N) sum over the first N primes of exp(2 pi i f(p))| along a schedule.

    Irrational coefficients are passed as decimal strings (or Decimals) with
    at least 30 significant digits; ints and Fractions count as rational.
    At least one non-constant coefficient must be irrational.
    """
    coeffs = list(coeffs)
    if len(coeffs) < 2 or not any(_is_declared_irrational(c) for c in coeffs[1:]):
        raise ValueError("need a non-constant coefficient given as a high-precision decimal")
    schedule = [int(n) for n in N_schedule]
    if not schedule or min(schedule) < 1:
        raise ValueError("schedule entries must be positive")
    exact = [_exact_scalar(c) if not isinstance(c, (int, Fraction)) else Fraction(c) for c in coeffs]
    N = max(schedule)
    primes = first_n_primes(N).primes
    residues, den = _phase_residues(exact, primes)
    t = np.array([r / den for r in (residues.tolist() if isinstance(residues, np.ndarray) else residues)])
    z = np.exp(1j * TWO_PI * t)
    csum = np.cumsum(z)
    return [float(abs(csum[n - 1]) / n) for n in schedule]


def fit_loglog_slope(xs, ys) -> float:
    """Least-squares slope of log y against log x."""
    lx = np.log(np.asarray(xs, dtype=np.float64))
    ly = np.log(np.asarray(ys, dtype=np.float64))
    slope, _ = np.polyfit(lx, ly, 1)
    return float(slope)


def odd_primes_upto(limit: int) -> list[int]:
    return [int(p) for p in _kernels.sieve_primes(limit) if p > 2]


@dataclass(frozen=True)
class ScanRow:
    b: int
    T: int
    w_max: int
    sum_magnitude: float


def gauss_scan(P: RationalPolynomial, bmax: int):
    """Complete-sum magnitudes over odd primes b <= bmax and their log-log slope."""
    rows = []
    for b in odd_primes_upto(bmax):
        s = lemma6_complete_sum(P, b)
        rows.append(ScanRow(b, 0, 0, abs(s.value)))
    slope = fit_loglog_slope([r.b for r in rows], [r.sum_magnitude for r in rows])
    return rows, slope


def lemma3_scan(f: RationalPolynomial, T: int, bmax: int, a: int = 1):
    """lemma3_sum / T over odd primes b <= bmax and the log-log slope."""
    rows = []
    for b in odd_primes_upto(bmax):
        rows.append(ScanRow(b, T, T, lemma3_sum(f, a, b, T)))
    slope = fit_loglog_slope([r.b for r in rows], [r.sum_magnitude / r.T for r in rows])
    return rows, slope
