"""Periodic bump functions with sub-exponential Fourier decay.

g_eps is a finite convolution of centred, mass-one pieces with widths
proportional to 1/j^2 (j = 1..J), scaled so the widths sum to eps.  Each
piece is a triangle (an indicator convolved with itself), so every Fourier
coefficient is a product of squared sincs: real, in [0, 1], even in m, and
equal to 1 at m = 0.  The support is [-eps/2, eps/2].

Widths ~ 1/j^2 are what give exp(-c sqrt(eps |m|)) decay: at frequency m
roughly sqrt(eps m) factors are past their first zero, and their product
behaves like exp(-c sqrt(eps m)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

#: Ratio between consecutive block edges in the rigorous tail sums.
_BLOCK_RATIO = 1.02


@dataclass(frozen=True, eq=False)
class BumpFunction:
    eps: float
    M_max: int
    widths: tuple
    paired: bool
    coeffs: np.ndarray  # coefficient at m = 0..M_max; negative m by symmetry
    decay_constant: float

    def fourier(self, m: int) -> float:
        m = abs(int(m))
        if m > self.M_max:
            raise IndexError(f"frequency {m} is outside the table (M_max={self.M_max})")
        return float(self.coeffs[m])

    @property
    def factor_scales(self) -> np.ndarray:
        """Per-factor sinc arguments divided by m."""
        w = np.asarray(self.widths)
        return w / 2.0 if self.paired else w

    @property
    def power(self) -> int:
        return 2 if self.paired else 1

    def envelope(self, x: float) -> float:
        """Upper bound for |g^(m)| valid for every |m| >= x > 0 (decreasing in x)."""
        a = self.factor_scales
        f = np.minimum(1.0, 1.0 / (np.pi * x * a))
        return float(np.prod(f ** self.power))


def default_factor_count(M_max: int) -> int:
    return max(32, math.ceil(2.0 * math.sqrt(M_max)))


def _widths(eps: float, J: int) -> np.ndarray:
    base = 1.0 / np.arange(1, J + 1, dtype=np.float64) ** 2
    return eps * base / base.sum()


def build_bump(eps: float, M_max: int = 10_000, n_factors: int | None = None, paired: bool = True) -> BumpFunction:
    """Build g_eps with its Fourier table for |m| <= M_max.

    ``paired=False`` uses bare indicators instead of triangles (coefficients
    may then be negative); with ``n_factors=1`` this is the single-indicator
    case.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if M_max < 1:
        raise ValueError("M_max must be at least 1")
    J = default_factor_count(M_max) if n_factors is None else int(n_factors)
    if J < 1:
        raise ValueError("need at least one factor")
    widths = _widths(eps, J)
    scales = widths / 2.0 if paired else widths
    m = np.arange(M_max + 1, dtype=np.float64)
    coeffs = np.ones(M_max + 1, dtype=np.float64)
    for a in scales:
        s = np.sinc(m * a)
        coeffs *= s * s if paired else s
    coeffs[0] = 1.0
    decay = float(np.max(np.abs(coeffs) * np.exp(np.sqrt(eps * m))))
    coeffs.setflags(write=False)
    return BumpFunction(float(eps), int(M_max), tuple(float(w) for w in widths), paired, coeffs, decay)


def envelope_tail(g: BumpFunction, start: int, q: int = 1) -> float:
    """Rigorous upper bound for sum over m >= start of envelope(m)^q (one side)."""
    start = max(1, int(start))
    a = g.factor_scales
    J = a.shape[0]
    p = g.power
    X = math.ceil(1.0 / (np.pi * a.min()))
    total = 0.0
    lo = start
    while lo < X:
        hi = min(X, max(lo + 1, math.ceil(lo * _BLOCK_RATIO)))
        total += (hi - lo) * g.envelope(lo) ** q
        lo = hi
    # beyond X every factor is in its decaying regime: envelope(x)^q = K x^-(p q J)
    expo = p * q * J
    if expo <= 1:
        return math.inf
    head = g.envelope(lo) ** q
    return total + head * (1.0 + lo / (expo - 1.0))


def eval_bump(g: BumpFunction, t) -> tuple:
    """Truncated Fourier synthesis of g at t, with an error bound.

    Returns ``(value, error_bound)``; ``t`` may be a scalar or an array.  The
    bound covers the omitted frequencies plus worst-case float rounding of
    the (M_max + 2)-term sum.
    """
    t_arr = np.asarray(t, dtype=np.float64)
    m = np.arange(1, g.M_max + 1, dtype=np.float64)
    flat = t_arr.reshape(-1)
    vals = np.empty(flat.shape[0])
    c = np.asarray(g.coeffs[1:])
    for start in range(0, flat.shape[0], 256):
        chunk = flat[start : start + 256]
        vals[start : start + 256] = 1.0 + 2.0 * np.cos(2.0 * np.pi * np.outer(chunk, m)) @ c
    gamma = (g.M_max + 2) * np.finfo(np.float64).eps
    bound = 2.0 * envelope_tail(g, g.M_max + 1, 1) + gamma * _abs_sum(g, g.M_max)
    value = vals.reshape(t_arr.shape)
    return (float(value) if value.ndim == 0 else value), bound


def l2_mass(g: BumpFunction) -> tuple:
    """Integral of g^2 over a period by Parseval: ``(value, truncation_bound)``."""
    c = np.asarray(g.coeffs)
    value = float(c[0] ** 2 + 2.0 * np.sum(c[1:] ** 2))
    return value, 2.0 * envelope_tail(g, g.M_max + 1, 2)


def tensor_coefficient(g: BumpFunction, m_vec: Sequence[int]) -> float:
    """Coefficient of h(z) = prod g(z_i) at an integer frequency vector."""
    out = 1.0
    for mi in m_vec:
        out *= g.fourier(mi)
    return out


def truncation_threshold(eps: float) -> int:
    """floor((4 / eps) * ln(1/eps)^2)."""
    # 1/e itself is admitted (ln(1/eps) == 1 up to rounding)
    if not 0 < eps <= math.exp(-1) * (1 + 1e-12):
        raise ValueError("eps must lie in (0, 1/e]")
    return math.floor(4.0 / eps * math.log(1.0 / eps) ** 2)


def _abs_sum(g: BumpFunction, upto: int) -> float:
    c = np.abs(np.asarray(g.coeffs[: upto + 1]))
    return float(c[0] + 2.0 * c[1:].sum())


def tail_mass_bound(g: BumpFunction, T: int, n: int) -> float:
    """Upper bound on sum over ||m||_inf > T of |h^(m)| for the n-fold tensor bump.

    Equals A^n - B^n with A the full absolute coefficient sum (table plus a
    rigorous envelope tail) and B the sum over |m| <= T.
    """
    if T > g.M_max:
        raise IndexError(f"T={T} exceeds the coefficient table (M_max={g.M_max})")
    A = _abs_sum(g, g.M_max) + 2.0 * envelope_tail(g, g.M_max + 1, 1)
    B = _abs_sum(g, T)
    return A ** n - B ** n


def decay_series_tail(eps: float, T: int) -> float:
    """Upper bound on sum over m >= T of exp(-sqrt(eps m))."""
    s = math.sqrt(eps * T)
    return math.exp(-s) * (1.0 + 2.0 / eps * (s + 1.0))


def certified_tail_bound(g: BumpFunction, T: int, n: int) -> float:
    """2n C sum over m >= T of exp(-sqrt(eps m)) using the fitted decay constant C."""
    return 2.0 * n * g.decay_constant * decay_series_tail(g.eps, T)


@lru_cache(maxsize=None)
def eps1(n: int, grid_points: int = 48, M_max: int = 2_000) -> float:
    """Largest grid eps below which the certified tail bound stays under 1/2.

    Scans a log grid of eps in [1e-5, 1/e] from the bottom up and returns the
    last eps before the first failure (0.0 if the smallest already fails).
    """
    grid = np.geomspace(1e-5, math.exp(-1) * (1 - 1e-9), grid_points)
    best = 0.0
    for eps in grid:
        g = build_bump(float(eps), M_max)
        if certified_tail_bound(g, truncation_threshold(float(eps)), n) >= 0.5:
            break
        best = float(eps)
    return best
