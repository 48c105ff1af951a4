"""Exact and floating-point arithmetic on the torus R^d / Z^d.

Exact points hold reduced :class:`fractions.Fraction` coordinates in [0, 1);
float points hold binary floats.  Covering radii are computed exactly in
dimension one and certified to an interval on a grid otherwise.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

from glasner import _kernels

#: Slack added to grid-certified bounds to absorb float rounding of distances.
FLOAT_TOL = 1e-12

#: Denominators below this take the int64 kernel path.
INT64_DENOM_LIMIT = 1 << 30


class Metric(str, enum.Enum):
    SUP = "sup"
    EUCLIDEAN = "euclidean"


class Verdict(str, enum.Enum):
    DENSE = "Dense"
    NOT_DENSE = "NotDense"
    UNKNOWN = "Unknown"


def _frac_mod1(q) -> Fraction:
    q = Fraction(q)
    return Fraction(q.numerator % q.denominator, q.denominator)


def _float_mod1(v: float) -> float:
    r = float(v) % 1.0
    # -1e-20 % 1.0 rounds to 1.0
    return 0.0 if r >= 1.0 else r


@dataclass(frozen=True)
class ExactTorusPoint:
    coords: tuple

    def __post_init__(self):
        if len(self.coords) == 0:
            raise ValueError("torus point needs at least one coordinate")
        object.__setattr__(self, "coords", tuple(_frac_mod1(c) for c in self.coords))

    @property
    def dim(self) -> int:
        return len(self.coords)

    exact = True

    def to_float(self) -> "FloatTorusPoint":
        return FloatTorusPoint(tuple(float(c) for c in self.coords))

    def __str__(self):
        return "(" + ", ".join(str(c) for c in self.coords) + ")"


@dataclass(frozen=True)
class FloatTorusPoint:
    coords: tuple

    def __post_init__(self):
        if len(self.coords) == 0:
            raise ValueError("torus point needs at least one coordinate")
        object.__setattr__(self, "coords", tuple(_float_mod1(c) for c in self.coords))

    @property
    def dim(self) -> int:
        return len(self.coords)

    exact = False

    def __str__(self):
        return "(" + ", ".join(repr(c) for c in self.coords) + ")"


TorusPoint = ExactTorusPoint | FloatTorusPoint


def reduce_to_torus(v: Iterable) -> TorusPoint:
    """Reduce a vector mod 1.

    Integers and rationals give an exact point; anything else (floats,
    decimals) gives a float point.
    """
    v = list(v)
    if all(isinstance(c, Rational) for c in v):
        return ExactTorusPoint(tuple(v))
    return FloatTorusPoint(tuple(float(c) for c in v))


def as_point(p) -> TorusPoint:
    if isinstance(p, (ExactTorusPoint, FloatTorusPoint)):
        return p
    return reduce_to_torus(p)


class PointSet:
    """A finite set of pairwise distinct torus points of one kind and dimension."""

    def __init__(self, points: Iterable, *, dedupe: bool = False):
        pts = [as_point(p) for p in points]
        if not pts:
            raise ValueError("point set is empty")
        exact = pts[0].exact
        dim = pts[0].dim
        for p in pts:
            if p.exact != exact:
                raise ValueError("point set mixes exact and float points")
            if p.dim != dim:
                raise ValueError(f"dimension mismatch: {p.dim} != {dim}")
        if dedupe:
            pts = list(dict.fromkeys(pts))
        elif len(set(pts)) != len(pts):
            raise ValueError("point set contains repeated points")
        self.points = tuple(pts)
        self.exact = exact
        self.dim = dim

    @property
    def k(self) -> int:
        return len(self.points)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __eq__(self, other):
        return isinstance(other, PointSet) and self.points == other.points

    def __hash__(self):
        return hash(self.points)

    def __repr__(self):
        kind = "exact" if self.exact else "float"
        return f"PointSet(k={self.k}, dim={self.dim}, {kind})"

    def as_float_array(self) -> np.ndarray:
        return np.array([[float(c) for c in p.coords] for p in self.points], dtype=np.float64)

    def common_denominators(self):
        """Per-point integer form: point i equals A[i] / D[i] coordinatewise.

        Returns Python-int lists ``(A, D)``; only defined for exact sets.
        """
        if not self.exact:
            raise TypeError("float point sets have no denominators")
        A, D = [], []
        for p in self.points:
            den = math.lcm(*(c.denominator for c in p.coords))
            A.append([c.numerator * (den // c.denominator) for c in p.coords])
            D.append(den)
        return A, D

    def int64_form(self):
        """``(A, D)`` as int64 arrays, or None when a denominator is too large."""
        A, D = self.common_denominators()
        if max(D) >= INT64_DENOM_LIMIT:
            return None
        return np.array(A, dtype=np.int64).reshape(self.k, self.dim), np.array(D, dtype=np.int64)


def _coord_gap_exact(a: Fraction, b: Fraction) -> Fraction:
    d = abs(a - b)
    return min(d, 1 - d)


def _coord_gap_float(a: float, b: float) -> float:
    d = abs(float(a) - float(b))
    return min(d, 1.0 - d)


def torus_distance(x, y, metric: Metric | str = Metric.SUP) -> float:
    """Wraparound distance between two torus points."""
    x, y = as_point(x), as_point(y)
    metric = Metric(metric)
    if x.dim != y.dim:
        raise ValueError(f"dimension mismatch: {x.dim} != {y.dim}")
    if x.exact and y.exact:
        gaps = [_coord_gap_exact(a, b) for a, b in zip(x.coords, y.coords)]
        if metric is Metric.SUP:
            return float(max(gaps))
        return math.sqrt(float(sum(g * g for g in gaps)))
    gaps = [_coord_gap_float(a, b) for a, b in zip(x.coords, y.coords)]
    if metric is Metric.SUP:
        return max(gaps)
    return math.sqrt(sum(g * g for g in gaps))


def max_distance(dim: int, metric: Metric | str = Metric.SUP) -> float:
    """Diameter of the torus T^dim under ``metric``."""
    return 0.5 if Metric(metric) is Metric.SUP else 0.5 * math.sqrt(dim)


@dataclass(frozen=True)
class _Coverage:
    lo: float
    hi: float
    witness: TorusPoint
    grid_resolution: float
    exact_radius: Fraction | None = None


def _coverage_1d(S: PointSet) -> _Coverage:
    if S.exact:
        xs = sorted(p.coords[0] for p in S.points)
        best = xs[0] + 1 - xs[-1]
        best_i = len(xs) - 1
        for i in range(len(xs) - 1):
            g = xs[i + 1] - xs[i]
            if g > best or (g == best and i < best_i):
                best, best_i = g, i
        radius = best / 2
        witness = ExactTorusPoint((xs[best_i] + radius,))
        r = float(radius)
        return _Coverage(r, r, witness, 0.0, exact_radius=radius)
    coords = np.array([p.coords[0] for p in S.points], dtype=np.float64)
    r, mid = _kernels.circle_radius(coords)
    return _Coverage(r, r, FloatTorusPoint((mid,)), 0.0)


def grid_size(dim: int, resolution: float, metric: Metric) -> int:
    """Grid cells per axis so the certified interval has width <= resolution."""
    slack_budget = resolution - 2 * FLOAT_TOL
    if slack_budget <= 0:
        raise ValueError(f"resolution {resolution} is below float tolerance")
    scale = 1.0 if metric is Metric.SUP else math.sqrt(dim)
    return max(1, math.ceil(scale / (2.0 * slack_budget)))


def _coverage_grid(points: np.ndarray, dim: int, exact: bool, resolution: float, metric: Metric) -> _Coverage:
    G = grid_size(dim, resolution, metric)
    value, flat = _kernels.grid_max_min_dist(points, G, metric is Metric.EUCLIDEAN)
    h = 1.0 / G
    slack = h / 2.0 if metric is Metric.SUP else h * math.sqrt(dim) / 2.0
    lo = max(0.0, value - FLOAT_TOL)
    hi = min(max_distance(dim, metric), value + slack + FLOAT_TOL)
    idx = np.unravel_index(int(flat), (G,) * dim)
    if exact:
        witness = ExactTorusPoint(tuple(Fraction(int(i), G) for i in idx))
    else:
        witness = FloatTorusPoint(tuple(int(i) / G for i in idx))
    return _Coverage(lo, hi, witness, h)


def _coverage(S: PointSet, resolution: float, metric: Metric) -> _Coverage:
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    if S.dim == 1:
        return _coverage_1d(S)
    return _coverage_grid(S.as_float_array(), S.dim, S.exact, resolution, metric)


def covering_radius(S: PointSet, resolution: float = 1e-3, metric: Metric | str = Metric.SUP):
    """Interval ``(lo, hi)`` containing max over y of dist(y, S).

    Dimension one is solved exactly by sorting (lo == hi).  Higher dimensions
    evaluate the distance-to-set function on a uniform grid; since it is
    1-Lipschitz, the grid maximum plus half a cell diagonal bounds it above.
    """
    if not isinstance(S, PointSet):
        S = PointSet(S)
    cov = _coverage(S, resolution, Metric(metric))
    return cov.lo, cov.hi


@dataclass(frozen=True)
class DensityReport:
    verdict: Verdict
    covering_radius_lo: float
    covering_radius_hi: float
    witness: TorusPoint | None
    grid_resolution: float
    eps: float
    metric: Metric = Metric.SUP

    @property
    def dense(self) -> bool:
        return self.verdict is Verdict.DENSE

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "eps": self.eps,
            "metric": self.metric.value,
            "covering_radius_lo": self.covering_radius_lo,
            "covering_radius_hi": self.covering_radius_hi,
            "grid_resolution": self.grid_resolution,
            "witness": None if self.witness is None else [str(c) for c in self.witness.coords],
        }


def _exactly_uncovered(w: ExactTorusPoint, S: PointSet, eps: Fraction, metric: Metric) -> bool:
    for p in S.points:
        gaps = [_coord_gap_exact(a, b) for a, b in zip(w.coords, p.coords)]
        if metric is Metric.SUP:
            if max(gaps) <= eps:
                return False
        elif sum(g * g for g in gaps) <= eps * eps:
            return False
    return True


def is_eps_dense(
    S: PointSet,
    eps: float,
    resolution: float = 1e-3,
    metric: Metric | str = Metric.SUP,
) -> DensityReport:
    """Three-valued eps-density verdict for a finite point set.

    Dense when the certified covering radius is <= eps, NotDense (with an
    uncovered witness) when it is > eps, Unknown when eps falls inside the
    certified interval.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    if not isinstance(S, PointSet):
        S = PointSet(S)
    metric = Metric(metric)
    cov = _coverage(S, resolution, metric)
    if cov.exact_radius is not None:
        dense = cov.exact_radius <= Fraction(eps)
        verdict = Verdict.DENSE if dense else Verdict.NOT_DENSE
    elif cov.hi <= eps:
        verdict = Verdict.DENSE
    elif cov.lo > eps:
        verdict = Verdict.NOT_DENSE
        if S.exact and not _exactly_uncovered(cov.witness, S, Fraction(eps), metric):
            verdict = Verdict.UNKNOWN
    else:
        verdict = Verdict.UNKNOWN
    witness = cov.witness if verdict is Verdict.NOT_DENSE else None
    return DensityReport(verdict, cov.lo, cov.hi, witness, cov.grid_resolution, float(eps), metric)


def apply_integer_matrix(M: Sequence[Sequence[int]], x) -> TorusPoint:
    """Image M x mod 1 of a torus point under an integer matrix.

    Exact inputs are mapped exactly with arbitrary-precision integers.
    """
    x = as_point(x)
    rows = [[int(v) for v in row] for row in M]
    if not rows or any(len(r) != x.dim for r in rows):
        raise ValueError(f"matrix shape does not match point dimension {x.dim}")
    for row, orig in zip(rows, M):
        for v, o in zip(row, orig):
            if v != o:
                raise ValueError("matrix entries must be integers")
    if x.exact:
        return ExactTorusPoint(tuple(sum((a * c for a, c in zip(row, x.coords)), Fraction(0)) for row in rows))
    # float images lose absolute precision once |a| * c exceeds 2**52
    return FloatTorusPoint(tuple(math.fsum(a * c for a, c in zip(row, x.coords)) for row in rows))


def image(M, S: PointSet) -> PointSet:
    """Image of a point set under M, with coincident images merged."""
    return PointSet((apply_integer_matrix(M, p) for p in S.points), dedupe=True)
