"""Pair statistics of rational differences.

For a set of k distinct points z_i in T^m, h_b counts pairs i < j whose
difference has minimal denominator b (the least b with b(z_i - z_j) in Z^m),
and H_b = h_1 + ... + h_b.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from glasner import _kernels
from glasner.torus import ExactTorusPoint, PointSet, as_point


def min_denominator(x, y) -> int:
    """Least b >= 1 with b (x - y) in Z^m."""
    x, y = as_point(x), as_point(y)
    if not (x.exact and y.exact):
        raise TypeError("minimal denominators need exact points")
    if x.dim != y.dim:
        raise ValueError(f"dimension mismatch: {x.dim} != {y.dim}")
    return math.lcm(*((a - b).denominator for a, b in zip(x.coords, y.coords)))


@dataclass(frozen=True)
class PairCountProfile:
    h: dict  # b >= 2 -> h_b, only nonzero entries
    k: int
    m: int
    h1: int = 0

    @property
    def support(self) -> list[int]:
        return sorted(self.h)

    @property
    def total_pairs(self) -> int:
        return self.h1 + sum(self.h.values())

    def cumulative(self) -> list[tuple[int, int, int]]:
        """Rows (b, h_b, H_b) over the support in increasing b."""
        rows, H = [], self.h1
        for b in self.support:
            H += self.h[b]
            rows.append((b, self.h[b], H))
        return rows

    def H(self, b: int) -> int:
        return self.h1 + sum(v for s, v in self.h.items() if s <= b)


def profile(S: PointSet) -> PairCountProfile:
    """Exact histogram of minimal denominators over all k(k-1)/2 pairs."""
    if not isinstance(S, PointSet):
        S = PointSet(S)
    if not S.exact:
        raise TypeError("pair counts are undefined for float point sets")
    if S.k < 2:
        return PairCountProfile({}, S.k, S.dim)
    fast = S.int64_form()
    if fast is not None:
        dens = _kernels.pair_denominators(*fast)
        values, counts = np.unique(dens, return_counts=True)
        hist = {int(b): int(c) for b, c in zip(values, counts)}
    else:
        hist = Counter()
        pts = S.points
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                hist[min_denominator(pts[i], pts[j])] += 1
        hist = dict(hist)
    h1 = hist.pop(1, 0)
    return PairCountProfile(dict(sorted(hist.items())), S.k, S.dim, h1)


@dataclass
class HbBoundReport:
    holds: bool
    checked: int
    violations: list = field(default_factory=list)  # (b, H_b, k b^(m+1))
    alpha: float | None = None  # m == 1 only

    def __bool__(self):
        return self.holds


def verify_Hb_bound(p: PairCountProfile) -> HbBoundReport:
    """Check H_b <= k b^(m+1) for every b.

    H_b is constant between support points while the bound grows, so the
    support suffices.  For m = 1 also report the least alpha >= 0 with
    H_b <= (k b)^(1 + alpha) for all b.
    """
    violations = []
    alpha = 0.0 if p.m == 1 else None
    rows = p.cumulative()
    for b, _, H in rows:
        bound = p.k * b ** (p.m + 1)
        if H > bound:
            violations.append((b, H, bound))
        if p.m == 1 and H > 0:
            alpha = max(alpha, math.log(H) / math.log(p.k * b) - 1.0)
    return HbBoundReport(not violations, len(rows), violations, alpha)


def lemma4_term(b: int, c: float, T: float, r: float, n: int) -> float:
    return (c * T * b ** (-r) + 1.0) ** n - 1.0


def lemma4_sum(p: PairCountProfile, c: float, T: float, r: float, n: int) -> float:
    """sum over b >= 2 of h_b ((c T b^-r + 1)^n - 1); finite since h has finite support."""
    if not 0 < r < 1:
        raise ValueError("r must lie in (0, 1)")
    if c <= 0 or T <= 0:
        raise ValueError("c and T must be positive")
    return math.fsum(hb * lemma4_term(b, c, T, r, n) for b, hb in p.h.items())


def lemma4_bound_shape(k: int, T: float, r: float, m: int, n: int) -> float:
    """T^n k^(2 - r/(m+1)); the bound is a fitted constant times this."""
    return T ** n * k ** (2.0 - r / (m + 1))


def fit_lemma4_constant(profiles, c: float, T: float, r: float, n: int) -> float:
    """Smallest C with lemma4_sum <= C T^n k^(2 - r/(m+1)) over a calibration batch."""
    return max(
        lemma4_sum(p, c, T, r, n) / lemma4_bound_shape(p.k, T, r, p.m, n) for p in profiles if p.k >= 2
    )


def translate(S: PointSet, v) -> PointSet:
    """Shift every point of an exact set by a rational vector."""
    shift = [Fraction(c) for c in v]
    return PointSet(ExactTorusPoint(tuple(a + s for a, s in zip(p.coords, shift))) for p in S.points)
