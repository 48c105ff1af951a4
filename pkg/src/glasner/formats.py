"""JSON and CSV readers/writers for point sets, families and reports."""

from __future__ import annotations

import csv
import io
import json
import math
from fractions import Fraction

from glasner.polynomials import MatrixFamily, Mode, RationalPolynomial
from glasner.torus import ExactTorusPoint, FloatTorusPoint, PointSet


class FormatError(ValueError):
    """Malformed input file; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _line_of(text: str, token: str) -> int | None:
    pos = text.find(token)
    return None if pos < 0 else text.count("\n", 0, pos) + 1


def _load(text: str) -> dict:
    if not text.strip():
        raise FormatError("empty input", 1)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(exc.msg, exc.lineno) from None
    if not isinstance(data, dict):
        raise FormatError("top level must be a JSON object", 1)
    return data


def _require(data: dict, key: str, text: str):
    if key not in data:
        raise FormatError(f"missing key {key!r}", 1)
    return data[key]


def _fraction(value, text: str) -> Fraction:
    try:
        if isinstance(value, bool) or not isinstance(value, (str, int)):
            raise ValueError
        return Fraction(value.strip() if isinstance(value, str) else value)
    except (ValueError, ZeroDivisionError):
        raise FormatError(f"bad rational {value!r}", _line_of(text, json.dumps(value))) from None


def parse_pointset(text: str) -> PointSet:
    """Parse ``{"dim": d, "exact": bool, "points": [[coord, ...], ...]}``.

    Exact coordinates are "num/den" strings or integers; float coordinates
    are decimal strings or numbers.
    """
    data = _load(text)
    dim = _require(data, "dim", text)
    exact = _require(data, "exact", text)
    points = _require(data, "points", text)
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise FormatError("dim must be a positive integer", _line_of(text, '"dim"'))
    if not isinstance(exact, bool):
        raise FormatError("exact must be true or false", _line_of(text, '"exact"'))
    if not isinstance(points, list) or not points:
        raise FormatError("points must be a non-empty list", _line_of(text, '"points"'))
    out = []
    for i, p in enumerate(points):
        if not isinstance(p, list) or len(p) != dim:
            raise FormatError(f"point {i} must have {dim} coordinates", _line_of(text, json.dumps(p)))
        if exact:
            out.append(ExactTorusPoint(tuple(_fraction(c, text) for c in p)))
        else:
            try:
                coords = tuple(float(c) for c in p)
            except (TypeError, ValueError):
                raise FormatError(f"bad coordinate in point {i}", _line_of(text, json.dumps(p))) from None
            if not all(math.isfinite(c) for c in coords):
                raise FormatError(f"non-finite coordinate in point {i}", _line_of(text, json.dumps(p)))
            out.append(FloatTorusPoint(tuple(c % 1.0 for c in coords)))
    try:
        return PointSet(out)
    except ValueError as exc:
        raise FormatError(str(exc), _line_of(text, '"points"')) from None


def dump_pointset(S: PointSet) -> str:
    if S.exact:
        rows = [[f"{c.numerator}/{c.denominator}" for c in p.coords] for p in S.points]
    else:
        rows = [[repr(float(c)) for c in p.coords] for p in S.points]
    body = ",\n".join("    " + json.dumps(r) for r in rows)
    return f'{{\n  "dim": {S.dim},\n  "exact": {json.dumps(S.exact)},\n  "points": [\n{body}\n  ]\n}}\n'


def parse_family(text: str) -> MatrixFamily:
    """Parse ``{"n", "m", "mode", "entries"}``.

    ``entries`` lists the n*m coefficient vectors (ascending degree) in
    row-major order; an n x m nested grid is accepted too.
    """
    data = _load(text)
    n, m = _require(data, "n", text), _require(data, "m", text)
    for key, v in (("n", n), ("m", m)):
        if not isinstance(v, int) or isinstance(v, bool) or v < 1:
            raise FormatError(f"{key} must be a positive integer", _line_of(text, f'"{key}"'))
    mode = data.get("mode", "independent")
    try:
        mode = Mode(mode)
    except ValueError:
        raise FormatError(f"mode must be 'independent' or 'single', got {mode!r}", _line_of(text, '"mode"')) from None
    entries = _require(data, "entries", text)
    if not isinstance(entries, list):
        raise FormatError("entries must be a list", _line_of(text, '"entries"'))
    if len(entries) == n and all(isinstance(r, list) and r and all(isinstance(e, list) for e in r) for r in entries):
        flat = [e for r in entries for e in r]
    else:
        flat = entries
    if len(flat) != n * m:
        raise FormatError(f"expected {n * m} entries, got {len(flat)}", _line_of(text, '"entries"'))
    polys = []
    for e in flat:
        if not isinstance(e, list) or not e:
            raise FormatError("each entry must be a non-empty coefficient list", _line_of(text, json.dumps(e)))
        polys.append(RationalPolynomial(tuple(_fraction(c, text) for c in e)))
    return MatrixFamily(tuple(tuple(polys[i * m : (i + 1) * m]) for i in range(n)), mode)


def dump_family(fam: MatrixFamily) -> str:
    entries = [[str(c) for c in f.coeffs] for f in fam.flat()]
    body = ",\n".join("    " + json.dumps(e) for e in entries)
    return (
        f'{{\n  "n": {fam.n},\n  "m": {fam.m},\n  "mode": "{fam.mode.value}",\n'
        f'  "entries": [\n{body}\n  ]\n}}\n'
    )


def _json_default(obj):
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if hasattr(obj, "item"):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _clean(obj):
    # json emits Infinity/NaN, which strict parsers reject
    if isinstance(obj, float) and not math.isfinite(obj):
        return "nan" if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def dump_json(config: dict, report) -> str:
    """Stable JSON document: sorted keys, config header first."""
    return json.dumps(_clean({"config": config, "report": report}), sort_keys=True, indent=2, default=_json_default) + "\n"


def dump_csv(config: dict, header, rows, footer=None) -> str:
    """CSV with the effective config as a leading ``# config:`` comment line."""
    buf = io.StringIO()
    buf.write("# config: " + json.dumps(_clean(config), sort_keys=True, default=_json_default) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(_clean(list(r)))
    if footer:
        w.writerow(_clean(list(footer)))
    return buf.getvalue()


def expsum_scan_rows(rows, slope: float):
    return ["b", "T", "w_max", "sum_magnitude", "fitted_slope"], [
        (r.b, r.T, r.w_max, repr(r.sum_magnitude), repr(slope)) for r in rows
    ]


def paircount_rows(p):
    return ["b", "h_b", "H_b"], p.cumulative()


def paircount_scan_rows(entries):
    """``entries``: iterable of (k, sum, bound)."""
    return ["k", "sum", "bound", "ratio"], [(k, repr(s), repr(b), repr(s / b)) for k, s, b in entries]


def bump_rows(g):
    header = ["m", "coefficient", "decay_bound"]
    rows = [(m, repr(float(c)), repr(g.decay_constant * math.exp(-math.sqrt(g.eps * m)))) for m, c in enumerate(g.coeffs)]
    return header, rows


def scan_rows(result):
    header = ["eps", "k_min", "k_fail", "budget", "primes_tested"]
    rows = [(r.eps, r.k_min, "" if r.k_fail is None else r.k_fail, r.budget, r.primes_tested) for r in result.rows]
    footer = ["fitted_exponent", result.fitted_exponent, "reference_exponent", result.reference_exponent, ""]
    return header, rows, footer
