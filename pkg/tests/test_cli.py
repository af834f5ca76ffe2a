from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from cxmut.cli import EXIT_BUDGET, EXIT_INPUT, EXIT_MISMATCH, EXIT_OK, main

INPUTS = Path(__file__).resolve().parent.parent / "inputs"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_validate_context_and_point(capsys):
    code, out, _ = run(capsys, "validate", "--context", INPUTS / "p2_context.json",
                       "--point", INPUTS / "p2_complex_point.json")
    assert code == EXIT_OK
    tree = json.loads(out)
    assert tree["point"]["residual_blocks"] == []


def test_mutate_round_trip(capsys, tmp_path):
    code, out, _ = run(capsys, "mutate", "--dir", "1to2", "--space", INPUTS / "scalar_type1.json",
                       "--point", INPUTS / "scalar_point.json")
    assert code == EXIT_OK
    tree = json.loads(out)
    (tmp_path / "s2.json").write_text(json.dumps(tree["space"]))
    (tmp_path / "y.json").write_text(json.dumps(tree["point"]))
    code, out, _ = run(capsys, "mutate", "--dir", "2to1", "--space", tmp_path / "s2.json",
                       "--point", tmp_path / "y.json")
    assert code == EXIT_OK
    back = json.loads(out)["point"]
    orig = json.loads((INPUTS / "scalar_point.json").read_text())
    assert back == orig


def test_chain_mutation_left(capsys):
    code, out, _ = run(capsys, "mutate", "--dir", "left", "--point", INPUTS / "p2_complex_point.json",
                       "--at", 1, "--kernel", "H1")
    assert code == EXIT_OK and "certificate" in json.loads(out)


def test_check_verdicts(capsys):
    code, out, _ = run(capsys, "check", "--level", "G", "--point", INPUTS / "p2_complex_point.json",
                       "--pol", INPUTS / "p2_complex_pol.json")
    assert code == EXIT_OK and json.loads(out)["verdict"] == "stable"
    code, out, _ = run(capsys, "check", "--level", "red", "--point", INPUTS / "pathological_point.json",
                       "--pol", INPUTS / "pathological_pol.json")
    assert code == EXIT_OK


def test_chambers_csv(capsys):
    code, out, _ = run(capsys, "--report", "csv", "chambers", "--setting", "ex2", "--n", 2)
    assert code == EXIT_OK
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["path", "value"]
    assert ["1/3", "1", "3"] == [v for k, v in rows[1:] if k.startswith("values")]


def test_certify_with_file_constants(capsys):
    code, out, _ = run(capsys, "certify", "--setting", "morphism", "--stats", INPUTS / "ex1_stats.json",
                       "--pol", INPUTS / "ex1_pol.json", "--constants", INPUTS / "ex1_constants.json")
    assert code in (EXIT_OK, EXIT_MISMATCH)
    assert "results" in json.loads(out)


def test_input_errors(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{\"a\": }")
    code, _, err = run(capsys, "check", "--point", bad, "--pol", bad)
    assert code == EXIT_INPUT and "bad.json:1:" in err
    code, _, err = run(capsys, "check", "--point", tmp_path / "missing.json", "--pol", bad)
    assert code == EXIT_INPUT
    code, _, _ = run(capsys, "nonsense")
    assert code == EXIT_INPUT


def test_budget_exit(capsys):
    code, _, err = run(capsys, "--budget", 10, "constants", "--which", "c1", "--k", 2, "--mode", "exact",
                       "--p", 5)
    assert code == EXIT_BUDGET and "budget" in err


def test_out_file(capsys, tmp_path):
    dest = tmp_path / "r.json"
    code, out, _ = run(capsys, "--out", dest, "chambers", "--setting", "ex3", "--n", 2, "--n1", 5)
    assert code == EXIT_OK and out == ""
    assert json.loads(dest.read_text())["values"] == ["1/5", "2/5"]
