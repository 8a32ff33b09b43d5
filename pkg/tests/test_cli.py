import json
import subprocess
import sys

import pytest

from greedylab import cli
from greedylab.verifier import run_suite, parse_suite

MINI = {"suite_id": "mini", "spaces": ["lp:2", "summing"], "weights": ["const:1"], "dims": [3],
        "cor_1_11": False}


def test_chebyshev_json(capsys):
    assert cli.main(["chebyshev", "--space", "summing", "--vector", "3,-5,1", "--m", "2"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["value"] == 0.5
    assert out["sets"][0]["coeffs"] == {"1": 3.0, "2": -4.5}


def test_chebyshev_ties_listed(capsys):
    assert cli.main(["chebyshev", "--space", "lp:2", "--vector", "2,2,2", "--m", "2"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert len(out["sets"]) == 3 and sum(s["natural"] for s in out["sets"]) == 1


def test_constants_writes_report(tmp_path, capsys):
    dest = tmp_path / "rep.json"
    assert cli.main(["constants", "--space", "sup", "--dim", "4", "--levels", "0,1,2", "--out", str(dest)]) == 0
    text = capsys.readouterr().out
    assert text.startswith("Cq")
    rep = json.loads(dest.read_text())
    assert rep["constants"]["Cq"]["value"] == pytest.approx(1.0)


def test_admissible_summary(capsys):
    assert cli.main(["admissible", "--space", "lp:2", "--rho", "1.5", "--dim", "5", "--max-size", "2",
                     "--random", "20"]) == 0
    last = capsys.readouterr().out.strip().splitlines()[-1]
    assert last.endswith("sets admit a threshold at rho=1.5")


def test_run_writes_ledger(tmp_path, capsys):
    suite = tmp_path / "suite.json"
    suite.write_text(json.dumps(MINI))
    out = tmp_path / "out"
    assert cli.main(["run", "--suite", str(suite), "--out", str(out)]) == 0
    assert {p.name for p in out.iterdir()} >= {"ledger.csv", "ledger.json", "constants.csv"}
    assert "0 fail" in capsys.readouterr().out


def test_run_exit_code_on_failure(tmp_path, monkeypatch, capsys):
    ledger = run_suite(parse_suite(json.dumps(MINI)))
    ledger.rows[0].check.verdict = "fail"
    monkeypatch.setattr(cli, "run_suite", lambda cfg, progress=None: ledger)
    assert cli.main(["run", "--out", str(tmp_path)]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_bad_inputs_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"entries": [{"space": "lp:zero", "weight": "const:1", "N": 4}]}')
    assert cli.main(["run", "--suite", str(bad), "--out", str(tmp_path / "o")]) == 2
    assert "line 1, field entries[0].space" in capsys.readouterr().err
    assert cli.main(["constants", "--space", "nope", "--dim", "3"]) == 2
    assert cli.main(["chebyshev", "--space", "lp:2", "--vector", "1,2", "--m", "3"]) == 2
    with pytest.raises(SystemExit):
        cli.main(["chebyshev", "--space", "lp:2", "--vector", "a,b", "--m", "1"])


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "greedylab", "chebyshev", "--space", "sup",
                          "--vector", "4,1,0", "--m", "1"], capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["value"] == 1.0
