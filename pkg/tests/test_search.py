import itertools
import json
import math
from dataclasses import replace
from fractions import Fraction as F
from pathlib import Path

import pytest

from glasner.formats import parse_family
from glasner.polynomials import MatrixFamily, Mode, RationalPolynomial
from glasner.search import (
    SearchConfig,
    Strategy,
    exponent_scan,
    generate_adversarial,
    graded_lex,
    halfgrid_image_check,
    packing_lower_bound,
    packing_set,
    search,
)
from glasner.torus import ExactTorusPoint, PointSet, Verdict, image, is_eps_dense, torus_distance

FIXTURES = Path(__file__).parent / "fixtures"


def fam(grid, mode=Mode.INDEPENDENT):
    return MatrixFamily(tuple(tuple(RationalPolynomial(tuple(e)) for e in row) for row in grid), mode)


FX = fam([[(0, 1)]])
FAM22 = fam([[(0, 1), (0, 0, 1)], [(0, 2), (0, F(1, 2), F(1, 2))]])
SINGLE21 = fam([[(0, 1)], [(0, 0, 1)]], Mode.SINGLE)
GRID97 = PointSet(ExactTorusPoint((F(i, 97),)) for i in range(97))


def strip(rep):
    d = rep.to_dict()
    d.pop("wall_time")
    return d


def test_grid97_found():
    rep = search(FX, GRID97, SearchConfig(eps=0.02, prime_budget=50))
    assert rep.found and rep.density.verdict is Verdict.DENSE
    p = rep.witness_primes[0][0]
    assert math.gcd(p, 97) == 1
    assert rep.density.covering_radius_hi == pytest.approx(1 / 194, abs=1e-15)


@pytest.mark.parametrize("family", [FX, FAM22, SINGLE21, fam([[(0, 1, 1), (0, 3)]])])
@pytest.mark.parametrize("strategy", ["exhaustive", "random"])
def test_halfgrid_never_found(family, strategy):
    X = generate_adversarial("halfgrid", 2**family.m, family.m)
    rep = search(family, X, SearchConfig(eps=0.2, prime_budget=40, strategy=strategy, max_assignments=300))
    assert not rep.found and rep.budget_exhausted
    assert rep.density.verdict is not Verdict.DENSE


def test_single_zero_point():
    rep = search(FX, PointSet([ExactTorusPoint((0,))]), SearchConfig(eps=0.4, prime_budget=100))
    assert not rep.found and rep.primes_tested == 100
    assert rep.density.covering_radius_lo == 0.5


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        search(FAM22, GRID97, SearchConfig(eps=0.1))


def test_invalid_family_rejected():
    with pytest.raises(ValueError, match="integer_valued"):
        search(fam([[(0, F(1, 2))]]), GRID97, SearchConfig(eps=0.1))


def test_config_validation():
    for bad in ({"eps": 0.5}, {"eps": 0.1, "prime_budget": 0}, {"eps": 0.1, "resolution": 0}):
        with pytest.raises(ValueError):
            SearchConfig(**bad)
    assert SearchConfig(eps=0.1).T_freq == 212


def test_soundness_and_monotonicity_2d():
    X = generate_adversarial("ball", 40, 2, {"rho": 0.05}, seed=3)
    cfg = SearchConfig(eps=0.2, prime_budget=30, max_assignments=3000, resolution=1e-2)
    rep = search(FAM22, X, cfg)
    assert rep.found
    again = is_eps_dense(image(rep.matrix, X), cfg.eps, cfg.resolution / 2)
    assert again.verdict is Verdict.DENSE
    for bigger in (0.25, 0.3, 0.45):
        assert is_eps_dense(image(rep.matrix, X), bigger, cfg.resolution).verdict is Verdict.DENSE


@pytest.mark.parametrize("strategy", ["exhaustive", "random", "greedy"])
def test_determinism_and_thread_independence(strategy):
    X = generate_adversarial("ball", 30, 2, seed=5)
    cfg = SearchConfig(eps=0.2, prime_budget=25, strategy=strategy, rng_seed=9, max_assignments=600)
    a = strip(search(FAM22, X, cfg))
    assert a == strip(search(FAM22, X, cfg))
    assert a == strip(search(FAM22, X, replace(cfg, threads=4)))


def test_greedy_single_mode_rejected():
    X = generate_adversarial("ball", 5, 1, seed=0)
    with pytest.raises(ValueError):
        search(SINGLE21, X, SearchConfig(eps=0.2, strategy=Strategy.GREEDY))


def test_single_mode_iterates_leading_primes():
    X = PointSet([ExactTorusPoint((0,))])
    rep = search(SINGLE21, X, SearchConfig(eps=0.3, prime_budget=17))
    assert rep.primes_tested == 17 and not rep.found


def test_graded_lex_order():
    seq = list(graded_lex(4, 2))
    assert sorted(seq) == sorted(itertools.product(range(4), repeat=2))
    assert len(set(seq)) == 16
    assert [max(t) for t in seq] == sorted(max(t) for t in seq)
    assert seq[:4] == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_generators():
    hg = generate_adversarial("halfgrid", 4, 2)
    assert {p.coords for p in hg} == {(0, 0), (0, F(1, 2)), (F(1, 2), 0), (F(1, 2), F(1, 2))}
    with pytest.raises(ValueError):
        generate_adversarial("halfgrid", 3, 2)
    ap = generate_adversarial("ap", 12, 1, {"a": 1, "q": 12})
    assert sorted(p.coords[0] for p in ap) == [F(j, 12) for j in range(12)]
    with pytest.raises(ValueError):
        generate_adversarial("ap", 12, 1, {"a": 2, "q": 12})
    rnd = generate_adversarial("random", 50, 2, {"D": 9}, seed=1)
    assert rnd.k == 50 and all(c.denominator <= 9 for p in rnd for c in p.coords)
    assert generate_adversarial("random", 50, 2, {"D": 9}, seed=1) == rnd


@pytest.mark.parametrize("m, rho, k", [(1, 0.05, 30), (2, 0.02, 100), (3, 0.1, 50)])
def test_ball_cluster(m, rho, k):
    S = generate_adversarial("ball", k, m, {"rho": rho}, seed=k)
    assert S.k == k
    assert all(torus_distance(x, y) <= 2 * rho for x, y in itertools.combinations(S.points, 2))


@pytest.mark.parametrize("n, eps, want", [(2, 0.1, 100), (1, 0.3, 3), (3, 0.5, 8)])
def test_packing_lower_bound(n, eps, want):
    assert packing_lower_bound(n, eps) == want


@pytest.mark.parametrize("n, eps", [(1, 0.1), (2, 0.2), (1, 0.3), (3, 0.25)])
def test_packing_set_not_dense(n, eps):
    S = packing_set(n, eps)
    assert S.k == packing_lower_bound(n, eps)
    assert is_eps_dense(S, eps, resolution=1e-2).verdict is Verdict.NOT_DENSE


@pytest.mark.parametrize("family", [FX, FAM22, SINGLE21])
def test_halfgrid_image_check(family):
    assert halfgrid_image_check(family, trials=100, seed=2)


def test_scan_halfgrid_rows_infinite():
    with pytest.warns(RuntimeWarning):
        res = exponent_scan(FX, "halfgrid", [0.2, 0.1], SearchConfig(eps=0.2, prime_budget=30))
    assert all(r.k_min == math.inf and r.exhausted for r in res.rows)
    assert math.isnan(res.fitted_exponent)


def test_scan_single_eps_nan():
    with pytest.warns(RuntimeWarning):
        res = exponent_scan(FX, "random", [0.1], SearchConfig(eps=0.1, prime_budget=50), params={"D": 1000})
    assert math.isnan(res.fitted_exponent) and math.isfinite(res.rows[0].k_min)


def test_scan_ball_exponent_at_least_n():
    res = exponent_scan(FX, "ball", [0.2, 0.1, 0.05], SearchConfig(eps=0.2, prime_budget=200))
    assert res.fitted_exponent >= FX.n
    assert res.reference_exponent == 2
    for r in res.rows:
        assert r.k_fail is None or r.k_fail < r.k_min


def test_scan_rejects_increasing_schedule():
    with pytest.raises(ValueError):
        exponent_scan(FX, "random", [0.1, 0.2], SearchConfig(eps=0.1))


def test_scan_regression_fixture():
    fx = json.loads((FIXTURES / "scan_m1n1.json").read_text())
    family = parse_family(json.dumps(fx["family"]))
    cfg = SearchConfig(eps=fx["schedule"][0], prime_budget=fx["prime_budget"], rng_seed=fx["rng_seed"])
    res = exponent_scan(family, fx["generator"], fx["schedule"], cfg, reps=fx["reps"], params=fx["params"])
    for row, want in zip(res.rows, fx["k_min"]):
        assert want / 2 <= row.k_min <= 2 * want
