import json
import re
import subprocess
import sys

import pytest

from glasner import cli
from glasner.formats import FormatError, dump_family, dump_pointset, parse_family, parse_pointset
from glasner.search import generate_adversarial

FX = '{"n": 1, "m": 1, "mode": "independent", "entries": [["0", "1"]]}'
HALF = '{"dim": 1, "exact": true, "points": [["0"], ["1/2"]]}'
GRID97 = json.dumps({"dim": 1, "exact": True, "points": [[f"{i}/97"] for i in range(97)]})


@pytest.fixture
def files(tmp_path):
    out = {}
    for name, text in {"fx": FX, "half": HALF, "grid97": GRID97, "empty": ""}.items():
        p = tmp_path / f"{name}.json"
        p.write_text(text)
        out[name] = str(p)
    return out


def run(argv, capsys):
    code = cli.main(argv)
    return code, capsys.readouterr()


def test_density_exit_codes(files, capsys):
    code, out = run(["density", files["half"], "--eps", "0.3"], capsys)
    assert code == 0 and json.loads(out.out)["report"]["verdict"] == "Dense"
    code, out = run(["density", files["half"], "--eps", "0.2"], capsys)
    assert code == 1 and json.loads(out.out)["report"]["witness"] == ["1/4"]
    code, _ = run(["density", files["empty"], "--eps", "0.2"], capsys)
    assert code == cli.EXIT_USAGE


def test_density_unknown_exit(tmp_path, capsys):
    p = tmp_path / "two.json"
    p.write_text('{"dim": 2, "exact": true, "points": [["0", "0"], ["1/2", "1/2"]]}')
    code, out = run(["density", str(p), "--eps", "0.5", "--resolution", "0.2", "--metric", "euclidean"], capsys)
    rep = json.loads(out.out)["report"]
    assert code == 2 and rep["covering_radius_lo"] <= 0.5 < rep["covering_radius_hi"]


def test_malformed_file_line_number(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{"dim": 1,\n "exact": true,\n "points": [["0"],\n ["x/3"]]}')
    code, out = run(["density", str(p), "--eps", "0.2"], capsys)
    assert code == cli.EXIT_DATAERR and "line 4" in out.err
    p.write_text('{"dim": 1,\n "exact": true\n "points": []}')
    code, out = run(["density", str(p), "--eps", "0.2"], capsys)
    assert code == cli.EXIT_DATAERR and "line 3" in out.err


def test_search_exit_codes(files, capsys):
    code, out = run(["search", files["fx"], files["half"], "--eps", "0.2", "--threads", "1"], capsys)
    assert code == 1 and json.loads(out.out)["report"]["found"] is False
    code, out = run(["search", files["fx"], files["grid97"], "--eps", "0.02"], capsys)
    assert code == 0 and json.loads(out.out)["report"]["found"] is True
    code, _ = run(["search", files["fx"], files["grid97"], "--eps", "0.02", "--budget", "0"], capsys)
    assert code == cli.EXIT_USAGE


def test_search_invalid_family_names_hypothesis(tmp_path, files, capsys):
    p = tmp_path / "bad_family.json"
    p.write_text('{"n": 1, "m": 2, "mode": "single", "entries": [["0", "1"], ["1", "1"]]}')
    code, out = run(["search", str(p), files["half"], "--eps", "0.2"], capsys)
    assert code == cli.EXIT_DATAERR and "linear_independence" in out.err


def test_unknown_flag_is_usage_error(files, capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["density", files["half"], "--eps", "0.2", "--bogus"])
    assert exc.value.code == cli.EXIT_USAGE


def test_help_lists_every_flag():
    text = cli.build_parser()._subparsers._group_actions[0].choices["search"].format_help()
    for flag in ("--eps", "--metric", "--resolution", "--budget", "--strategy", "--seed", "--threads", "--format", "--out"):
        assert flag in text


def strip_wall(text):
    return re.sub(r'"wall_time": [^,\n]+', "", text)


def test_search_reproducible(files, capsys):
    argv = ["search", files["fx"], files["grid97"], "--eps", "0.02", "--strategy", "random", "--seed", "4"]
    _, a = run(argv, capsys)
    _, b = run(argv + ["--threads", "3"], capsys)
    assert strip_wall(a.out) == strip_wall(b.out)


def test_verify_suites(capsys):
    assert run(["verify", "bump", "--eps", "0.1"], capsys)[0] == 0
    code, out = run(["verify", "expsum", "--f", "x^2", "--bmax", "2000"], capsys)
    assert code == 0 and "gauss_sum_slope" in out.out
    assert run(["verify", "paircount", "--k", "200", "--D", "50", "--sets", "3"], capsys)[0] == 0
    assert run(["verify", "multcomp", "--trials", "500"], capsys)[0] == 0
    assert run(["verify", "expsum", "--f", "x/2"], capsys)[0] == cli.EXIT_USAGE


def test_scan_csv(files, capsys):
    code, out = run(["scan", files["fx"], "--schedule", "0.2,0.1", "--generator", "halfgrid", "--budget", "20"], capsys)
    lines = out.out.splitlines()
    assert code == 0 and lines[0].startswith("# config: ")
    assert lines[1] == "eps,k_min,k_fail,budget,primes_tested"
    assert all(",inf," in ln for ln in lines[2:4])
    assert lines[-1].startswith("fitted_exponent,nan")
    assert "undetermined" in out.err


def test_scan_bad_schedule(files, capsys):
    assert run(["scan", files["fx"], "--schedule", "0.1,0.2"], capsys)[0] == cli.EXIT_USAGE


def test_generate_roundtrip(tmp_path, capsys):
    out = tmp_path / "g.json"
    assert run(["generate", "random", "--k", "20", "--m", "2", "--D", "30", "--out", str(out)], capsys)[0] == 0
    assert parse_pointset(out.read_text()) == generate_adversarial("random", 20, 2, {"D": 30})


def test_format_roundtrips():
    S = generate_adversarial("ball", 10, 3, seed=2)
    assert parse_pointset(dump_pointset(S)) == S
    fam = parse_family('{"n": 2, "m": 1, "mode": "single", "entries": [["0", "1"], ["0", "0", "1"]]}')
    assert parse_family(dump_family(fam)) == fam
    nested = parse_family('{"n": 1, "m": 2, "entries": [[["0", "1"], ["0", "0", "1"]]]}')
    assert nested.m == 2 and nested.n == 1
    with pytest.raises(FormatError):
        parse_family('{"n": 1, "m": 2, "entries": [["0", "1"]]}')


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "glasner.cli", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "density" in proc.stdout
