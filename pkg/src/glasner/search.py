"""Densification search over prime-indexed matrix families.

Given a family, a finite point set X in T^m and a target eps, look for a
prime assignment whose matrix M makes MX eps-dense in T^n.  A budgeted
search cannot prove that no such M exists: ``found=False`` only means none
was found within the budget.
"""

from __future__ import annotations

import enum
import itertools
import math
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache

import numpy as np

from glasner import _kernels
from glasner.bump import truncation_threshold
from glasner.expsums import first_n_primes
from glasner.polynomials import MatrixFamily, Mode, check_family, eval_at_integer
from glasner.torus import (
    DensityReport,
    ExactTorusPoint,
    Metric,
    PointSet,
    Verdict,
    _coverage_grid,
    apply_integer_matrix,
    image,
    is_eps_dense,
)

#: Screening slack on the float image radius before exact verification.
SCREEN_TOL = 1e-9

_INT64_MAX = (1 << 63) - 1


class Strategy(str, enum.Enum):
    EXHAUSTIVE = "exhaustive"
    RANDOM = "random"
    GREEDY = "greedy"


@dataclass(frozen=True)
class SearchConfig:
    eps: float
    metric: Metric = Metric.SUP
    resolution: float = 1e-3
    prime_budget: int = 1000
    strategy: Strategy = Strategy.EXHAUSTIVE
    rng_seed: int = 0
    T_freq: int | None = None
    max_assignments: int | None = None
    threads: int = 1

    def __post_init__(self):
        if not 0 < self.eps < 0.5:
            raise ValueError("eps must lie in (0, 1/2)")
        if self.prime_budget < 1:
            raise ValueError("prime_budget must be at least 1")
        if self.resolution <= 0:
            raise ValueError("resolution must be positive")
        if self.max_assignments is not None and self.max_assignments < 1:
            raise ValueError("max_assignments must be at least 1")
        object.__setattr__(self, "metric", Metric(self.metric))
        object.__setattr__(self, "strategy", Strategy(self.strategy))
        if self.T_freq is None and self.eps <= math.exp(-1):
            object.__setattr__(self, "T_freq", truncation_threshold(self.eps))

    @property
    def assignment_cap(self) -> int:
        return self.prime_budget if self.max_assignments is None else self.max_assignments

    def to_dict(self) -> dict:
        return {
            "eps": self.eps,
            "metric": self.metric.value,
            "resolution": self.resolution,
            "prime_budget": self.prime_budget,
            "strategy": self.strategy.value,
            "rng_seed": self.rng_seed,
            "T_freq": self.T_freq,
            "max_assignments": self.assignment_cap,
        }


@dataclass
class SearchReport:
    found: bool
    witness_primes: object
    matrix: list | None
    density: DensityReport | None
    primes_tested: int
    wall_time: float
    unknown_count: int = 0
    best_primes: object = None
    budget_exhausted: bool = False

    def to_dict(self) -> dict:
        return {
            "found": self.found,
            "witness_primes": self.witness_primes,
            "matrix": self.matrix,
            "density": None if self.density is None else self.density.to_dict(),
            "primes_tested": self.primes_tested,
            "unknown_count": self.unknown_count,
            "best_primes": self.best_primes,
            "budget_exhausted": self.budget_exhausted,
            "wall_time": self.wall_time,
        }


class _Evaluator:
    """Fast float screening of image covering radii, exact where it matters."""

    def __init__(self, X: PointSet, cfg: SearchConfig):
        self.X = X
        self.cfg = cfg
        self.fast = None
        if X.exact:
            form = X.int64_form()
            if form is not None and int(form[1].max()) < (1 << 31):
                self.fast = form
        self.floats = X.as_float_array()

    def image_coords(self, M) -> np.ndarray:
        if self.fast is not None and all(abs(v) <= _INT64_MAX for row in M for v in row):
            A, D = self.fast
            res = _kernels.image_residues(np.array(M, dtype=np.int64), A, D)
            return res / D[:, None]
        if self.X.exact:
            pts = [apply_integer_matrix(M, p) for p in self.X.points]
            return np.array([[float(c) for c in p.coords] for p in pts], dtype=np.float64)
        return np.mod(self.floats @ np.array(M, dtype=np.float64).T, 1.0)

    def radius(self, M) -> tuple[float, float]:
        coords = self.image_coords(M)
        n = coords.shape[1]
        if n == 1:
            r, _ = _kernels.circle_radius(coords[:, 0])
            return r, r
        # refine from a coarse grid; stop once the interval decides eps
        eps, target = self.cfg.eps, self.cfg.resolution
        res = max(eps / 4, target)
        while True:
            cov = _coverage_grid(coords, n, False, res, self.cfg.metric)
            if cov.lo > eps or cov.hi <= eps or res <= target:
                return cov.lo, cov.hi
            res = max(res / 4, target)

    def row_radius(self, row) -> float:
        return self.radius([row])[1]

    def exact_report(self, M, eps: float, resolution: float) -> DensityReport:
        if self.fast is not None and all(abs(v) <= _INT64_MAX for row in M for v in row):
            A, D = self.fast
            res = _kernels.image_residues(np.array(M, dtype=np.int64), A, D)
            pts = PointSet(
                (ExactTorusPoint(tuple(Fraction(int(v), int(d)) for v in r)) for r, d in zip(res, D)),
                dedupe=True,
            )
        else:
            pts = image(M, self.X)
        return is_eps_dense(pts, eps, resolution, self.cfg.metric)


def graded_lex(N: int, r: int):
    """Index tuples in range(N)^r ordered by max index, then lexicographically."""
    for s in range(N):
        for tup in itertools.product(range(s + 1), repeat=r):
            if s in tup:
                yield tup


def _matrix_for(fam: MatrixFamily, primes_grid) -> list[list[int]]:
    return [[eval_at_integer(f, p) for f, p in zip(frow, prow)] for frow, prow in zip(fam.entries, primes_grid)]


def _grid_from_indices(fam: MatrixFamily, pool: np.ndarray, idx) -> list[list[int]]:
    flat = [int(pool[i]) for i in idx]
    return [flat[i * fam.m : (i + 1) * fam.m] for i in range(fam.n)]


def _assignments(fam: MatrixFamily, cfg: SearchConfig, pool: np.ndarray):
    """Yield (primes, matrix) in the documented order for EXHAUSTIVE / RANDOM."""
    cap = cfg.assignment_cap
    N = pool.shape[0]
    if fam.mode is Mode.SINGLE:
        if cfg.strategy is Strategy.EXHAUSTIVE:
            idx_iter = ((i,) for i in range(N))
        else:
            rng = np.random.default_rng(cfg.rng_seed)
            idx_iter = ((int(rng.integers(0, N)),) for _ in range(cap))
        for idx in itertools.islice(idx_iter, cap):
            p = int(pool[idx[0]])
            yield p, _matrix_for(fam, [[p] * fam.m] * fam.n)
        return
    r = fam.n * fam.m
    if cfg.strategy is Strategy.EXHAUSTIVE:
        idx_iter = graded_lex(N, r)
    else:
        rng = np.random.default_rng(cfg.rng_seed)
        idx_iter = (tuple(int(v) for v in rng.integers(0, N, size=r)) for _ in range(cap))
    for idx in itertools.islice(idx_iter, cap):
        grid = _grid_from_indices(fam, pool, idx)
        yield grid, _matrix_for(fam, grid)


def _chunks(iterable, size):
    it = iter(iterable)
    while True:
        chunk = list(itertools.islice(it, size))
        if not chunk:
            return
        yield chunk


def search(fam: MatrixFamily, X: PointSet, cfg: SearchConfig) -> SearchReport:
    """Look for a prime assignment making the image of X eps-dense.

    EXHAUSTIVE walks the first ``prime_budget`` primes (single mode) or the
    prime-index grid in graded lexicographic order (independent mode);
    RANDOM draws uniform assignments from that pool with ``rng_seed``;
    GREEDY picks each row's primes to minimise that row's 1-D covering
    radius and then checks the joint matrix.  At most ``assignment_cap``
    assignments are screened.  A hit is re-verified exactly at the search
    resolution and at half of it before being reported.
    """
    start = time.perf_counter()
    report = check_family(fam)
    if not report:
        raise ValueError(f"invalid family: {', '.join(report.failures)}")
    if X.dim != fam.m:
        raise ValueError(f"point set dimension {X.dim} != family input dimension {fam.m}")
    pool = first_n_primes(cfg.prime_budget).primes
    ev = _Evaluator(X, cfg)
    if cfg.strategy is Strategy.GREEDY:
        return _greedy(fam, ev, cfg, pool, start)

    best = (math.inf, None, None)
    unknown = 0
    tested = 0
    threads = max(1, int(cfg.threads))
    executor = ThreadPoolExecutor(threads) if threads > 1 else None
    try:
        for chunk in _chunks(_assignments(fam, cfg, pool), 64 * threads):
            mats = [mat for _, mat in chunk]
            radii = list(executor.map(ev.radius, mats)) if executor else [ev.radius(M) for M in mats]
            for (primes, M), (lo, hi) in zip(chunk, radii):
                tested += 1
                if hi < best[0]:
                    best = (hi, primes, M)
                if lo <= cfg.eps < hi:
                    unknown += 1
                if hi <= cfg.eps + SCREEN_TOL:
                    dens = _verify(ev, M, cfg)
                    if dens is not None:
                        return SearchReport(
                            True, primes, M, dens, tested, time.perf_counter() - start, unknown, primes
                        )
    finally:
        if executor:
            executor.shutdown()
    density = ev.exact_report(best[2], cfg.eps, cfg.resolution) if best[2] is not None else None
    return SearchReport(
        False, None, None, density, tested, time.perf_counter() - start, unknown, best[1], budget_exhausted=True
    )


def _verify(ev: _Evaluator, M, cfg: SearchConfig) -> DensityReport | None:
    dens = ev.exact_report(M, cfg.eps, cfg.resolution)
    if dens.verdict is not Verdict.DENSE:
        return None
    again = ev.exact_report(M, cfg.eps, cfg.resolution / 2)
    return dens if again.verdict is Verdict.DENSE else None


def _greedy(fam: MatrixFamily, ev: _Evaluator, cfg: SearchConfig, pool, start) -> SearchReport:
    if fam.mode is not Mode.INDEPENDENT:
        raise ValueError("greedy search needs an independent-primes family")
    per_row = max(1, cfg.assignment_cap // fam.n)
    tested = 0
    grid, rows = [], []
    for i in range(fam.n):
        best = (math.inf, None, None)
        for idx in itertools.islice(graded_lex(pool.shape[0], fam.m), per_row):
            primes = [int(pool[j]) for j in idx]
            row = [eval_at_integer(f, p) for f, p in zip(fam.entries[i], primes)]
            tested += 1
            r = ev.row_radius(row)
            if r < best[0]:
                best = (r, primes, row)
        grid.append(best[1])
        rows.append(best[2])
    lo, hi = ev.radius(rows)
    unknown = int(lo <= cfg.eps < hi)
    if hi <= cfg.eps + SCREEN_TOL:
        dens = _verify(ev, rows, cfg)
        if dens is not None:
            return SearchReport(True, grid, rows, dens, tested, time.perf_counter() - start, unknown, grid)
    dens = ev.exact_report(rows, cfg.eps, cfg.resolution)
    return SearchReport(False, None, None, dens, tested, time.perf_counter() - start, unknown, grid, True)


# ---------------------------------------------------------------------------
# point-set generators


class Generator(str, enum.Enum):
    BALL_CLUSTER = "ball"
    HALF_GRID = "halfgrid"
    ARITHMETIC_PROGRESSION = "ap"
    RANDOM_BOUNDED_DENOMINATOR = "random"


@lru_cache(maxsize=16)
def _totient_cdf(D: int) -> np.ndarray:
    phi = np.arange(D + 1, dtype=np.int64)
    for p in _kernels.sieve_primes(D):
        phi[p::p] -= phi[p::p] // p
    phi[0] = 0
    return np.cumsum(phi)


def farey_count(D: int) -> int:
    """Number of reduced fractions a/d in [0, 1) with 1 <= d <= D."""
    return int(_totient_cdf(int(D))[-1])


def _random_reduced(rng: np.random.Generator, D: int) -> Fraction:
    cdf = _totient_cdf(D)
    u = int(rng.integers(0, int(cdf[-1])))
    d = int(np.searchsorted(cdf, u, side="right"))
    while True:
        a = int(rng.integers(0, d))
        if math.gcd(a, d) == 1:
            return Fraction(a, d)


def generate_adversarial(kind, k: int, m: int, params: dict | None = None, seed: int = 0) -> PointSet:
    """Draw a k-point set in T^m of the given kind.

    ball: k distinct rationals in a sup-ball of radius ``rho`` (default 0.05).
    halfgrid: {0, 1/2}^m, which forces k = 2^m.
    ap: {j a / q : j < k} with ``a`` (int or length-m list, default 1) and
    ``q`` (default k).
    random: coordinates uniform among reduced fractions with denominator at
    most ``D`` (default 50).
    """
    kind = Generator(kind)
    params = dict(params or {})
    if k < 1 or m < 1:
        raise ValueError("k and m must be positive")
    rng = np.random.default_rng(seed)
    if kind is Generator.HALF_GRID:
        if k != 2 ** m:
            raise ValueError(f"halfgrid in dimension {m} has exactly {2 ** m} points")
        half = (Fraction(0), Fraction(1, 2))
        return PointSet(ExactTorusPoint(c) for c in itertools.product(half, repeat=m))
    if kind is Generator.ARITHMETIC_PROGRESSION:
        q = int(params.get("q", k))
        a = params.get("a", 1)
        a = [int(a)] * m if np.isscalar(a) else [int(v) for v in a]
        order = q // math.gcd(q, *a)
        if order < k:
            raise ValueError(f"progression step has order {order} < k={k}")
        return PointSet(ExactTorusPoint(tuple(Fraction(j * ai, q) for ai in a)) for j in range(k))
    if kind is Generator.RANDOM_BOUNDED_DENOMINATOR:
        D = int(params.get("D", 50))
        if k > farey_count(D) ** m:
            raise ValueError(f"only {farey_count(D) ** m} points with denominators <= {D}")
        seen = {}
        while len(seen) < k:
            p = ExactTorusPoint(tuple(_random_reduced(rng, D) for _ in range(m)))
            seen.setdefault(p, None)
        return PointSet(seen)
    rho = float(params.get("rho", 0.05))
    if not 0 < rho < 0.5:
        raise ValueError("rho must lie in (0, 1/2)")
    D = int(params.get("D", 0))
    D = max(D, math.ceil(((2 * k) ** (1.0 / m) + 1) / (2 * rho)) + 1)
    R = int(rho * D)
    side = 2 * R + 1
    center = [Fraction(int(rng.integers(0, D)), D) for _ in range(m)]
    picks = rng.choice(side ** m, size=k, replace=False)
    pts = []
    for flat in picks.tolist():
        offs = []
        for _ in range(m):
            flat, r = divmod(flat, side)
            offs.append(r - R)
        pts.append(ExactTorusPoint(tuple(c + Fraction(o, D) for c, o in zip(center, offs))))
    return PointSet(pts)


def packing_lower_bound(n: int, eps: float) -> int:
    """floor(1/eps)^n."""
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    return math.floor(1 / eps) ** n


def packing_set(n: int, eps: float) -> PointSet:
    """floor(1/eps)^n points spread as a grid yet not eps-dense.

    Each axis holds q = floor(1/eps) equally spaced values squeezed into
    [0, 1 - 2 eps - margin), leaving a gap wider than 2 eps whose centre is
    farther than eps from every point.
    """
    q = packing_lower_bound(1, eps)
    e = Fraction(eps).limit_denominator(10**9)
    if e < Fraction(eps):
        e += Fraction(1, 10**9)
    span = 1 - 2 * e - Fraction(1, 8 * q)
    if span <= 0:
        raise ValueError("eps too large for a non-dense packing set")
    axis = [span * j / q for j in range(q)]
    return PointSet(ExactTorusPoint(c) for c in itertools.product(axis, repeat=n))


def halfgrid_image_check(fam: MatrixFamily, trials: int, seed: int = 0, prime_budget: int = 200) -> bool:
    """Exactly check that random family matrices map {0, 1/2}^m into {0, 1/2}^n."""
    X = generate_adversarial(Generator.HALF_GRID, 2 ** fam.m, fam.m)
    pool = first_n_primes(prime_budget).primes
    cfg = SearchConfig(eps=0.2, prime_budget=prime_budget, strategy=Strategy.RANDOM, rng_seed=seed, max_assignments=trials)
    allowed = {Fraction(0), Fraction(1, 2)}
    for _, M in _assignments(fam, cfg, pool):
        for p in X.points:
            if not set(apply_integer_matrix(M, p).coords) <= allowed:
                return False
    return True


# ---------------------------------------------------------------------------
# exponent scans


def reference_exponent(fam: MatrixFamily) -> float:
    L, m, n = fam.L, fam.m, fam.n
    if fam.mode is Mode.INDEPENDENT:
        return 2 * L * n if m == 1 else 2 * L * (m + 1) * n
    return (2 * L + 1) * n if m == 1 else (2 * L + 1) * (m + 1) * n


@dataclass
class ScanRow:
    eps: float
    k_min: float  # math.inf when no success up to k_max
    k_fail: int | None
    budget: int
    primes_tested: int
    exhausted: bool = False


@dataclass
class ExponentScanResult:
    rows: list
    fitted_exponent: float
    reference_exponent: float
    config: dict = field(default_factory=dict)


def _draw_seed(seed: int, k: int, rep: int) -> int:
    return int(np.random.SeedSequence([seed, k, rep]).generate_state(1)[0])


def exponent_scan(
    fam: MatrixFamily,
    kind,
    eps_schedule,
    cfg: SearchConfig,
    reps: int = 5,
    k_max: int = 1024,
    params: dict | None = None,
) -> ExponentScanResult:
    """Least k (majority over ``reps`` draws) at which search succeeds, per eps.

    Success in k is assumed monotone: k is doubled until success, then
    bisected.  The fitted exponent is the least-squares slope of log k_min
    against log(1/eps) over rows with finite k_min.
    """
    kind = Generator(kind)
    schedule = [float(e) for e in eps_schedule]
    if any(b >= a for a, b in zip(schedule, schedule[1:])):
        raise ValueError("eps schedule must be strictly decreasing")
    rows = []
    for eps in schedule:
        run_cfg = replace(cfg, eps=eps, T_freq=None)
        tested = 0
        cache = {}

        def success(k):
            nonlocal tested
            if k in cache:
                return cache[k]
            wins = 0
            for rep in range(reps):
                X = generate_adversarial(kind, k, fam.m, params, _draw_seed(cfg.rng_seed, k, rep))
                rep_cfg = replace(run_cfg, rng_seed=_draw_seed(cfg.rng_seed + 1, k, rep))
                rep_report = search(fam, X, rep_cfg)
                tested += rep_report.primes_tested
                wins += rep_report.found
            # ties count as failure
            cache[k] = 2 * wins > reps
            return cache[k]

        if kind is Generator.HALF_GRID:
            k = 2 ** fam.m
            ok = success(k)
            rows.append(ScanRow(eps, k if ok else math.inf, None if ok else k, cfg.prime_budget, tested, not ok))
            continue
        last_fail, k = 0, 1
        while k < k_max and not success(k):
            last_fail, k = k, min(2 * k, k_max)
        if not success(k):
            rows.append(ScanRow(eps, math.inf, k, cfg.prime_budget, tested, True))
            continue
        lo, hi = last_fail, k
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if success(mid):
                hi = mid
            else:
                lo = mid
        rows.append(ScanRow(eps, hi, lo if lo > 0 else None, cfg.prime_budget, tested))
    finite = [r for r in rows if math.isfinite(r.k_min)]
    if len(finite) < 2:
        warnings.warn("fewer than two finite rows; exponent fit is undetermined", RuntimeWarning, stacklevel=2)
        fitted = math.nan
    else:
        x = np.log([1.0 / r.eps for r in finite])
        y = np.log([float(r.k_min) for r in finite])
        if np.ptp(x) == 0:
            fitted = math.nan
        else:
            fitted = float(np.polyfit(x, y, 1)[0])
    config = {
        "generator": kind.value,
        "params": dict(params or {}),
        "reps": reps,
        "k_max": k_max,
        "schedule": schedule,
        "search": replace(cfg, eps=schedule[0]).to_dict(),
    }
    return ExponentScanResult(rows, fitted, float(reference_exponent(fam)), config)
