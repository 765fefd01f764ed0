import csv
import io
import json
from fractions import Fraction as F

import pytest

from lipdev.cli import COLUMNS, main
from lipdev.space import dumps_space, two_point


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.fixture
def tiny(tmp_path):
    path = tmp_path / "tiny.json"
    path.write_text(dumps_space(two_point()))
    return path


def test_compute_cube_csv_header_frozen():
    code, text = run("compute", "--space", "cube", "-n", "3", "-x", "0", "--format", "csv")
    assert code == 0
    assert text.splitlines()[0] == ",".join(COLUMNS)
    (row,) = rows(text)
    assert row["D_exact"] == "1" and row["space"] == "cube" and row["n"] == "3"


def test_compute_gauss():
    code, text = run("compute", "--space", "gauss", "-x", "0.3989422804")
    (row,) = rows(text)
    assert code == 0 and abs(float(row["D_decimal"]) - 0.5) < 1e-9
    assert row["D_exact"] == "" and row["gauss_tail"]


def test_compute_file_space(tiny):
    code, text = run("compute", "--space", f"file:{tiny}", "-x", "1/4")
    (row,) = rows(text)
    assert code == 0 and row["D_exact"] == "1/2"


def test_compute_sphere_and_cycle():
    _, text = run("compute", "--space", "sphere", "-n", "2", "-x", "0.39269908169872414")
    assert abs(float(rows(text)[0]["D_decimal"]) - 0.5) < 1e-9
    code, text = run("compute", "--space", "cycle", "-n", "6", "-x", "1/2")
    assert code == 0 and rows(text)[0]["D_exact"]


def test_sweep_in_unit_interval_and_monotone():
    for args in (
        ("--space", "cube", "-n", "6", "--xrange=-1:4:1/4"),
        ("--space", "power:cycle3^2", "--xrange=-1/2:2:1/8"),
        ("--space", "gauss", "--xrange", "0:4:1/4"),
        ("--space", "sphere", "-n", "4", "--xrange", "0:2:1/8"),
    ):
        code, text = run("compute", *args)
        assert code == 0
        vals = [float(r["D_decimal"]) for r in rows(text)]
        assert all(0 <= v <= 1 for v in vals)
        assert all(b <= a for a, b in zip(vals, vals[1:]))
        exact = [F(r["D_exact"]) for r in rows(text) if r["D_exact"]]
        assert all(b <= a for a, b in zip(exact, exact[1:]))


def test_compare_cube():
    code, text = run("compare", "--space", "cube", "-n", "10", "-x", "1,2,3")
    out = rows(text)
    assert code == 0 and len(out) == 3
    assert all(r["bound_ok"] == "yes" for r in out)


def test_profile_cube():
    code, text = run("profile", "--space", "cube", "-n", "3")
    out = rows(text)
    assert code == 0 and len(out) == 8 * 4
    assert list(out[0])[:4] == ["k", "h", "min_measure", "witness_bits"]
    first = {(r["k"], r["h"]): r["min_measure"] for r in out}
    assert first[("1", "1")] == "1/2"


def test_formats():
    code, text = run("compute", "--space", "cube", "-n", "2", "-x", "1/2,1", "--format", "json")
    data = json.loads(text)
    assert code == 0 and [d["D_exact"] for d in data] == ["1/2", "1/4"]
    code, text = run("compute", "--space", "cube", "-n", "2", "-x", "1", "--format", "md")
    assert text.startswith("| space |") and "| 1/4 |" in text


def test_config_errors(tmp_path, capsys):
    bad = tmp_path / "nonmetric.json"
    bad.write_text('{"labels": ["a","b","c"], "dist": [[0,1,5],[1,0,1],[5,1,0]]}')
    assert run("profile", "--space", f"file:{bad}")[0] == 2
    assert "triangle violation" in capsys.readouterr().err
    assert run("compute", "--space", "cube", "-x", "1")[0] == 2
    assert run("compute", "--space", "cube", "-n", "3")[0] == 2
    assert run("compute", "--space", "moon", "-x", "1")[0] == 2
    assert run("compute", "--space", "cube", "-n", "3", "-x", "abc")[0] == 2
    assert run("profile", "--space", "gauss")[0] == 2
    assert run("compute", "--space", f"file:{tmp_path}/missing.json", "-x", "1")[0] == 2
    assert run("bogus")[0] == 2


def test_cap_exceeded():
    assert run("compute", "--space", "power:two^5", "-x", "1")[0] == 3
    assert run("profile", "--space", "cube", "-n", "5")[0] == 3
    assert run("compute", "--space", "power:two^4", "-x", "1", "--cap", "15")[0] == 3
    assert run("compute", "--space", "power:two^4", "-x", "1")[0] == 0
    assert run("compute", "--space", "power:two^9", "-x", "1", "--cap", "20")[0] == 3


def test_verify_vacuous_and_info():
    code, text = run("verify", "--trials", "0", "--space", "power:diamond^2")
    assert code == 0
    assert "PASS  lipschitz_sampling" in text
    assert "INFO  isoperimetric[power:diamond^2]" in text
    assert "FAIL" not in text


def test_verify_deterministic_across_workers():
    a = run("verify", "--trials", "50", "--seed", "3", "--workers", "1")
    b = run("verify", "--trials", "50", "--seed", "3", "--workers", "4")
    assert a == b and a[0] == 0
