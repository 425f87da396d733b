import csv
import io
import json

import pytest

from fpscheme.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_list_maps(capsys):
    code, out, _ = run_cli(capsys, "list-maps")
    assert code == 0
    ids = [r["id"] for r in csv.DictReader(io.StringIO(out))]
    assert ids == ["paper_example", "halving", "rot_disc", "proj_box"]


def test_run_csv_stdout(capsys):
    code, out, _ = run_cli(capsys, "run", "--scheme", "new", "--alpha", "0.2",
                           "--beta", "rational:1,0,2,1", "--x0", "0.01", "--steps", "20")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 20
    assert round(float(rows[5]["x1"]), 5) == 0.5
    assert rows[-1]["cumulative_evals"] == "19"


def test_run_json_file(capsys, tmp_path):
    out = tmp_path / "t.json"
    code, _, _ = run_cli(capsys, "run", "--map", "rot_disc", "--scheme", "noor", "--x0", "0.3,0.4",
                         "--tol", "1e-8", "--format", "json", "--out", str(out))
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc[0]["stop_reason"] == "residual_tol"
    assert len(doc[0]["records"][0]["iterate"]) == 2


def test_run_config_file(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"map": "halving", "schemes": ["mann", "new"],
                               "initial_points": [0.9, -0.4], "stop": {"fixed_steps": 4}}))
    code, out, _ = run_cli(capsys, "run", "--config", str(cfg), "--p", "inf")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 16
    assert rows[0]["scheme_id"] == "mann@0.9"


def test_compare_summary(capsys, tmp_path):
    out = tmp_path / "cmp.csv"
    code, text, _ = run_cli(capsys, "compare", "--steps", "30", "--x0", "0.01", "--out", str(out))
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(text)))
    assert [r["tol"] for r in rows[:3]] == ["0.001", "1e-05", "1e-08"]
    new = [r for r in rows if r["scheme_id"] == "new"]
    # frozen from the exact rational oracle
    assert [r["iterations_to_tol"] for r in new] == ["4", "6", "9"]
    assert [r["evals_to_tol"] for r in new] == ["3", "5", "8"]
    assert out.exists()


def test_reproduce_table_exit_codes(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "reproduce-table", "--out", str(tmp_path / "cells.csv"))
    assert code == 0 and "156/156" in out
    rows = list(csv.DictReader(open(tmp_path / "cells.csv")))
    assert len(rows) == 160 and sum(r["erratum"] == "1" for r in rows) == 4

    bad = tmp_path / "bad.txt"
    from importlib import resources
    text = resources.files("fpscheme").joinpath("data/table1.txt").read_text()
    bad.write_text(text.replace("0.3236", "0.3300"))
    code, _, _ = run_cli(capsys, "reproduce-table", "--golden", str(bad))
    assert code == 1

    bad.write_text(text.replace("0.3236", "zzz"))
    code, _, err = run_cli(capsys, "reproduce-table", "--golden", str(bad))
    assert code == 2 and "line 4" in err


def test_reproduce_table_json(capsys, tmp_path):
    out = tmp_path / "r.json"
    code, _, _ = run_cli(capsys, "reproduce-table", "--steps", "1", "--format", "json",
                         "--out", str(out))
    doc = json.loads(out.read_text())
    assert code == 0 and doc["cells_compared"] == 8 and doc["passed"]


def test_config_errors_exit_2(capsys, tmp_path):
    code, _, err = run_cli(capsys, "run", "--map", "nope", "--alpha", "1.5")
    assert code == 2 and "nope" in err and "--alpha" in err
    cfg = tmp_path / "broken.json"
    cfg.write_text("{not json")
    code, _, _ = run_cli(capsys, "compare", "--config", str(cfg))
    assert code == 2
    code, _, _ = run_cli(capsys, "compare", "--scheme", "new")
    assert code == 2


def test_check_properties_cli(capsys):
    code, out, _ = run_cli(capsys, "check-properties", "--properties", "condition_I,nonexpansive")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 8 and all(r["passed"] == "1" for r in rows)

    code, out, _ = run_cli(capsys, "check-properties", "--properties", "")
    assert code == 0 and out.strip().count("\n") == 0

    code, out, _ = run_cli(capsys, "check-properties", "--properties", "afps",
                           "--start-samples", "0", "--include-picard", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and any(not r["passed"] for r in doc)

    code, _, _ = run_cli(capsys, "check-properties", "--map", "nowhere")
    assert code == 2
