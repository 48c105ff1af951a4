"""Command-line entry point.

Exit codes: density 0/1/2 for Dense/NotDense/Unknown; search 0 iff found;
verify 0 iff every check passes; 64 usage error; 65 malformed input.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import warnings
from fractions import Fraction

import numpy as np

from glasner import __version__
from glasner import formats
from glasner.formats import FormatError

EXIT_USAGE = 64
EXIT_DATAERR = 65


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_float(s):
    v = float(s)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {s}")
    return v


def _schedule(s):
    try:
        vals = [float(v) for v in s.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad schedule {s!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty schedule")
    return vals


def _common(p, *, eps_default=None):
    p.add_argument("--eps", type=_positive_float, default=eps_default, required=eps_default is None,
                   help="density target eps")
    p.add_argument("--metric", choices=["sup", "euclidean"], default="sup", help="torus metric")
    p.add_argument("--resolution", type=_positive_float, default=1e-3, help="covering-radius interval width")
    p.add_argument("--format", choices=["json", "csv"], default="json", help="output format")
    p.add_argument("--out", default=None, help="output path (default stdout)")


def _search_flags(p):
    p.add_argument("--budget", type=int, default=1000, help="number of leading primes to draw from")
    p.add_argument("--strategy", choices=["exhaustive", "random", "greedy"], default="exhaustive")
    p.add_argument("--max-assignments", type=int, default=None, help="cap on assignments tested (default: budget)")
    p.add_argument("--seed", type=int, default=0, help="rng seed")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1, help="worker threads")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="glasner", description="Density experiments on tori with prime-indexed matrix families.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("density", help="eps-density verdict for a point-set file")
    p.add_argument("pointset")
    _common(p)

    p = sub.add_parser("search", help="search for a prime assignment densifying a point set")
    p.add_argument("family")
    p.add_argument("pointset")
    _common(p)
    _search_flags(p)

    p = sub.add_parser("verify", help="run a module's check suite")
    p.add_argument("lemma", choices=["bump", "expsum", "paircount", "multcomp"])
    p.add_argument("--eps", type=_positive_float, default=0.1, help="bump width (bump)")
    p.add_argument("--f", default="x^2", help="polynomial in x (expsum)")
    p.add_argument("--bmax", type=int, default=2000, help="largest odd prime modulus (expsum)")
    p.add_argument("--k", type=int, default=200, help="points per set (paircount)")
    p.add_argument("--D", type=int, default=50, help="denominator bound (paircount)")
    p.add_argument("--m", type=int, default=1, help="dimension (paircount)")
    p.add_argument("--sets", type=int, default=10, help="random sets (paircount)")
    p.add_argument("--family", default=None, help="family file (multcomp; default: built-in examples)")
    p.add_argument("--trials", type=int, default=10_000, help="random witnesses (multcomp)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["json", "csv"], default="csv")
    p.add_argument("--out", default=None)

    p = sub.add_parser("scan", help="empirical k(eps) exponent scan")
    p.add_argument("family")
    p.add_argument("--schedule", type=_schedule, required=True, help="comma-separated decreasing eps values")
    p.add_argument("--generator", choices=["ball", "halfgrid", "ap", "random"], default="random")
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--k-max", type=int, default=1024)
    p.add_argument("--D", type=int, default=None, help="denominator bound (random, ball)")
    p.add_argument("--rho", type=float, default=None, help="cluster radius (ball)")
    p.add_argument("--metric", choices=["sup", "euclidean"], default="sup")
    p.add_argument("--resolution", type=_positive_float, default=1e-3)
    p.add_argument("--format", choices=["json", "csv"], default="csv")
    p.add_argument("--out", default=None)
    _search_flags(p)

    p = sub.add_parser("generate", help="write a generated point set as JSON")
    p.add_argument("kind", choices=["ball", "halfgrid", "ap", "random"])
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--D", type=int, default=None)
    p.add_argument("--rho", type=float, default=None)
    p.add_argument("--q", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    return parser


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    if not text.strip():
        raise UsageError(f"{path} is empty")
    return text


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def parse_poly(expr: str):
    """Parse a polynomial in x with rational coefficients (``^`` means power)."""
    import sympy
    from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

    from glasner.polynomials import RationalPolynomial

    x = sympy.Symbol("x")
    try:
        poly = sympy.Poly(parse_expr(expr, {"x": x}, transformations=standard_transformations + (convert_xor,)), x)
    except (sympy.SympifyError, sympy.PolynomialError, SyntaxError, TypeError) as exc:
        raise UsageError(f"cannot parse polynomial {expr!r}: {exc}") from None
    coeffs = []
    for c in reversed(poly.all_coeffs()):
        if not c.is_rational:
            raise UsageError(f"coefficient {c} of {expr!r} is not rational")
        coeffs.append(Fraction(int(c.p), int(c.q)))
    return RationalPolynomial(tuple(coeffs))


# ---------------------------------------------------------------------------
# commands


def cmd_density(args) -> int:
    from glasner.torus import Verdict, is_eps_dense

    S = formats.parse_pointset(_read(args.pointset))
    rep = is_eps_dense(S, args.eps, args.resolution, args.metric)
    config = {"command": "density", "pointset": args.pointset, "eps": args.eps, "metric": args.metric,
              "resolution": args.resolution}
    if args.format == "csv":
        d = rep.to_dict()
        text = formats.dump_csv(config, list(d), [[";".join(v) if isinstance(v, list) else v for v in d.values()]])
    else:
        text = formats.dump_json(config, rep.to_dict())
    _emit(text, args.out)
    return {Verdict.DENSE: 0, Verdict.NOT_DENSE: 1, Verdict.UNKNOWN: 2}[rep.verdict]


def _search_config(args, eps):
    from glasner.search import SearchConfig

    if args.budget < 1:
        raise UsageError("--budget must be at least 1")
    if args.threads < 1:
        raise UsageError("--threads must be at least 1")
    try:
        return SearchConfig(eps=eps, metric=args.metric, resolution=args.resolution, prime_budget=args.budget,
                            strategy=args.strategy, rng_seed=args.seed, max_assignments=args.max_assignments,
                            threads=args.threads)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _checked_family(path):
    from glasner.polynomials import check_family

    fam = formats.parse_family(_read(path))
    report = check_family(fam)
    if not report:
        raise FormatError("family fails hypotheses: " + ", ".join(report.failures))
    return fam


def cmd_search(args) -> int:
    from glasner.search import search

    cfg = _search_config(args, args.eps)
    fam = _checked_family(args.family)
    X = formats.parse_pointset(_read(args.pointset))
    if X.dim != fam.m:
        raise FormatError(f"point set dimension {X.dim} does not match family input dimension {fam.m}")
    rep = search(fam, X, cfg)
    config = {"command": "search", "family": args.family, "pointset": args.pointset, **cfg.to_dict()}
    d = rep.to_dict()
    if args.format == "csv":
        keys = ["found", "witness_primes", "matrix", "primes_tested", "unknown_count", "wall_time"]
        text = formats.dump_csv(config, keys, [[d[k] for k in keys]])
    else:
        text = formats.dump_json(config, d)
    _emit(text, args.out)
    return 0 if rep.found else 1


def _verify_bump(args):
    from glasner import bump

    eps = args.eps
    if not eps < 1:
        raise UsageError("--eps must lie in (0, 1)")
    g = bump.build_bump(eps)
    ref = bump.build_bump(0.1)
    c = np.asarray(g.coeffs)
    checks = [
        ("coefficient_zero_is_one", float(c[0]), 1.0, c[0] == 1.0),
        ("coefficients_in_unit_interval", float(c.min()), 0.0, bool(c.min() >= 0 and c.max() <= 1)),
        ("decay_constant_finite", g.decay_constant, 1e3, math.isfinite(g.decay_constant) and g.decay_constant <= 1e3),
    ]
    m = np.arange(c.shape[0])
    envelope = g.decay_constant * np.exp(-np.sqrt(eps * m))
    checks.append(("decay_holds_to_M_max", float(np.max(c - envelope)), 0.0, bool(np.all(c <= envelope * (1 + 1e-12)))))
    l2, _ = bump.l2_mass(g)
    ref_l2, _ = bump.l2_mass(ref)
    ratio = (eps * l2) / (0.1 * ref_l2)
    checks.append(("eps_l2_mass_ratio_to_eps_0.1", ratio, 2.0, 0.5 <= ratio <= 2.0))
    t = np.linspace(-0.5, 0.5, 2001)
    vals, err = bump.eval_bump(g, t)
    checks.append(("nonnegative_on_grid", float(vals.min()), -err, bool(vals.min() >= -err)))
    outside = np.abs(t) >= eps / 2 + 1e-9
    checks.append(("vanishes_off_support", float(np.abs(vals[outside]).max()) if outside.any() else 0.0, err,
                   bool(np.all(np.abs(vals[outside]) <= err))))
    if eps <= math.exp(-1):
        T = bump.truncation_threshold(eps)
        if T <= g.M_max:
            for n in (1, 2):
                tail = bump.tail_mass_bound(g, T, n)
                checks.append((f"tail_mass_below_half_n{n}", tail, 0.5, tail < 0.5))
    return {"eps": eps}, checks


def _verify_expsum(args):
    from glasner import expsums
    from glasner.polynomials import RationalPolynomial, is_integer_valued

    f = parse_poly(args.f)
    if f.degree < 1 or not is_integer_valued(f):
        raise UsageError(f"{args.f!r} must be a non-constant integer-valued polynomial")
    checks = []
    for a, b in ((1, 2), (1, 3)):
        lim = expsums.limit_prime_exp_sum_rational(f, a, b, 1).value
        emp = expsums.empirical_prime_exp_sum(f, Fraction(a, b), 1, 100_000).value
        err = abs(emp - lim)
        checks.append((f"oracle_agreement_{a}/{b}", err, 5e-3, err <= 5e-3))
        conj = expsums.limit_prime_exp_sum_rational(f, a, b, -1).value
        checks.append((f"conjugation_{a}/{b}", abs(conj - lim.conjugate()), 1e-12, abs(conj - lim.conjugate()) <= 1e-12))
    g, _ = f.integer_form()
    P = RationalPolynomial(tuple(g)).without_constant()
    _, slope = expsums.gauss_scan(P, args.bmax)
    checks.append(("gauss_sum_slope", slope, 0.55, slope <= 0.55))
    return {"f": str(f), "bmax": args.bmax}, checks


def _verify_paircount(args):
    from glasner.paircounts import profile, verify_Hb_bound
    from glasner.search import generate_adversarial

    if args.k < 1 or args.D < 1 or args.m < 1 or args.sets < 1:
        raise UsageError("--k, --D, --m and --sets must be positive")
    checks = []
    for i in range(args.sets):
        S = generate_adversarial("random", args.k, args.m, {"D": args.D}, seed=args.seed + i)
        rep = verify_Hb_bound(profile(S))
        checks.append((f"Hb_bound_set{i}", len(rep.violations), 0, rep.holds))
    return {"k": args.k, "D": args.D, "m": args.m, "sets": args.sets, "seed": args.seed}, checks


def _verify_multcomp(args):
    from glasner.polynomials import MatrixFamily, mult_complexity_bound, mult_complexity_witness_check

    if args.family:
        fam = _checked_family(args.family)
        cases = [(fam, [1] * fam.n)]
    else:
        cases = [(MatrixFamily([[[0, 1]]]), [1]), (MatrixFamily([[[0, 1], [0, 0, 1]]]), [1])]
    checks = []
    for i, (fam, m_vec) in enumerate(cases):
        Q = mult_complexity_bound(fam, m_vec).Q
        ok = mult_complexity_witness_check(fam, m_vec, args.trials, seed=args.seed + i)
        checks.append((f"witness_gcd_family{i}", Q, Q, ok))
    return {"trials": args.trials, "seed": args.seed, "family": args.family}, checks


def cmd_verify(args) -> int:
    runner = {"bump": _verify_bump, "expsum": _verify_expsum, "paircount": _verify_paircount,
              "multcomp": _verify_multcomp}[args.lemma]
    params, checks = runner(args)
    config = {"command": "verify", "lemma": args.lemma, **params}
    header = ["check", "value", "bound", "passed"]
    rows = [(name, value, bound, bool(ok)) for name, value, bound, ok in checks]
    if args.format == "csv":
        text = formats.dump_csv(config, header, rows)
    else:
        text = formats.dump_json(config, [dict(zip(header, r)) for r in rows])
    _emit(text, args.out)
    return 0 if all(r[3] for r in rows) else 1


def cmd_scan(args) -> int:
    from glasner.search import exponent_scan

    sched = args.schedule
    if any(b >= a for a, b in zip(sched, sched[1:])):
        raise UsageError("--schedule must be strictly decreasing")
    if not all(0 < e < 0.5 for e in sched):
        raise UsageError("schedule values must lie in (0, 1/2)")
    if args.reps < 1 or args.k_max < 1:
        raise UsageError("--reps and --k-max must be positive")
    cfg = _search_config(args, sched[0])
    fam = _checked_family(args.family)
    params = {k: v for k, v in (("D", args.D), ("rho", args.rho)) if v is not None}
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        result = exponent_scan(fam, args.generator, sched, cfg, reps=args.reps, k_max=args.k_max, params=params)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    config = {"command": "scan", "family": args.family, **result.config}
    if args.format == "csv":
        header, rows, footer = formats.scan_rows(result)
        text = formats.dump_csv(config, header, rows, footer)
    else:
        text = formats.dump_json(config, {
            "rows": [r.__dict__ for r in result.rows],
            "fitted_exponent": result.fitted_exponent,
            "reference_exponent": result.reference_exponent,
        })
    _emit(text, args.out)
    return 0


def cmd_generate(args) -> int:
    from glasner.search import generate_adversarial

    params = {k: v for k, v in (("D", args.D), ("rho", args.rho), ("q", args.q)) if v is not None}
    try:
        S = generate_adversarial(args.kind, args.k, args.m, params, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit(formats.dump_pointset(S), args.out)
    return 0


COMMANDS = {"density": cmd_density, "search": cmd_search, "verify": cmd_verify, "scan": cmd_scan,
            "generate": cmd_generate}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"glasner: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FormatError as exc:
        print(f"glasner: malformed input: {exc}", file=sys.stderr)
        return EXIT_DATAERR


if __name__ == "__main__":
    sys.exit(main())
