import json

import pytest

from planargeo.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_derive_prints_system(capsys):
    code, out, _ = run(capsys, "derive", "--model", "tetravalent")
    assert code == 0
    assert "R[n] = 1 + g*R[n]*(R[n+1]+R[n]+R[n-1])" in out
    assert "solved form:" in out


def test_solve_json(capsys):
    code, out, _ = run(capsys, "solve", "--model", "tetravalent", "--cutoff", "3", "--check")
    assert code == 0
    data = json.loads(out)
    terms = data["entries"]["R[0]"]["terms"]
    assert [t["num"] for t in terms] == ["1", "2", "9", "54"]


def test_solve_csv_header_and_determinism(capsys):
    args = ("solve", "--model", "trivalent", "--cutoff", "4", "--format", "csv", "--rows", "2")
    _, a, _ = run(capsys, *args)
    _, b, _ = run(capsys, *args)
    assert a == b
    lines = a.splitlines()
    assert lines[0].startswith("# planargeo series csv schema=1")
    assert lines[1] == "sequence,n,exponents,coefficient"


def test_bindings(capsys):
    code, out, _ = run(capsys, "solve", "--model", "bipartite3", "--bind", "gt1=1",
                       "--cutoff", "2")
    assert code == 0 and json.loads(out)["variables"] == ["g"]


def test_closedform_table(capsys):
    code, out, _ = run(capsys, "closedform", "--model", "tetravalent", "--at", "g=1/50",
                       "--cutoff", "30", "--n-upto", "5", "--tolerance", "1e-9")
    assert code == 0
    rows = [l.split(",") for l in out.splitlines()[2:]]
    assert len(rows) == 6 and all(float(r[3]) < 1e-9 for r in rows)


def test_oracle_census(capsys):
    code, out, _ = run(capsys, "oracle", "--family", "tetravalent", "--n-vertices", "2",
                       "--check")
    assert code == 0
    counts = dict(l.split(",") for l in out.splitlines()[2:])
    assert sum(map(int, counts.values())) == 18


def test_continuum_table(capsys):
    code, out, _ = run(capsys, "continuum", "--function", "tetravalent", "--points", "3")
    assert code == 0
    rows = [l.split(",") for l in out.splitlines()[2:]]
    assert len(rows) == 3 and all(float(r[3]) < 1e-9 for r in rows)


def test_usage_error_exit_code(capsys):
    code, _, err = run(capsys, "solve", "--model", "nonsense", "--cutoff", "2")
    assert code == 2
    assert json.loads(err)["error"] == "usage"
    code, _, err = run(capsys, "frobnicate")
    assert code == 2


def test_failure_exit_code(capsys):
    code, _, err = run(capsys, "oracle", "--family", "tetravalent", "--n-vertices", "9")
    assert code == 1
    assert json.loads(err)["type"] == "ResourceError"


def test_verify_single_criterion(capsys):
    code, out, _ = run(capsys, "verify", "--criterion", "3", "--quiet-timing")
    assert code == 0
    assert out.splitlines()[0].startswith("[PASS]  3.")
    assert out.splitlines()[-1] == "1/1 criteria pass"
