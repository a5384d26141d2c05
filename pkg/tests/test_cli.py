import csv
import io
import json
import subprocess
import sys

import pytest

from prophet_lab.cli import COLUMNS, SEED_ENV, main
from prophet_lab.hardsearch import import_hard

THREE = "0:0.5,1:0.4,10:0.1"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_ratio_examples(capsys):
    code, out, _ = run(capsys, "ratio", "--dist", "0:0.5,1:0.5", "--n", "3")
    assert code == 0
    (r,) = rows(out)
    assert list(r) == COLUMNS
    assert float(r["mean"]) == 1.0
    code, out, _ = run(capsys, "ratio", "--dist", THREE, "--n", "2")
    (r,) = rows(out)
    assert round(float(r["mean"]), 6) == 0.918699
    extra = json.loads(r["extra"])
    assert extra["V"] == pytest.approx([1.4, 2.26]) and extra["E"] == pytest.approx([1.4, 2.46])
    code, out, _ = run(capsys, "ratio", "--dist", "3:1", "--n", "5")
    assert float(rows(out)[0]["mean"]) == 1.0


def test_ratio_from_file_and_json_format(capsys, tmp_path):
    path = tmp_path / "d.json"
    path.write_text(json.dumps({"support": [0, 1, 10], "probs": [0.5, 0.4, 0.1]}))
    code, out, _ = run(capsys, "ratio", "--dist", str(path), "--n", "2", "--format", "json")
    assert code == 0
    (r,) = json.loads(out)
    assert round(r["mean"], 6) == 0.918699


def test_simulate_threshold_matches_dp(capsys):
    code, out, _ = run(capsys, "simulate", "--dist", THREE, "--n", "4", "--trials", "40000", "--seed", "3")
    assert code == 0
    (r,) = rows(out)
    assert r["seed"] == "3" and r["mode"] == "standard"
    assert abs(float(r["mean"]) - float(r["exact_reference"])) <= 3 * float(r["stderr"])


def test_simulate_is_byte_identical_and_worker_invariant(tmp_path):
    outs = []
    for i, workers in enumerate(["1", "1", "3"]):
        path = tmp_path / f"o{i}.csv"
        assert main(["simulate", "--dist", THREE, "--n", "12", "--policy", "window-A", "--k", "3",
                     "--trials", "5000", "--seed", "9", "--workers", workers, "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1] == outs[2]


def test_window_vs_batch_gap_nonnegative(capsys):
    code, out, _ = run(capsys, "simulate", "--dist", THREE, "--n", "12", "--policy", "window-vs-batch",
                       "--k", "3", "--trials", "5000")
    assert code == 0
    extra = json.loads(rows(out)[0]["extra"])
    assert extra["min_gap"] >= 0 and extra["gap_mean"] >= 0


@pytest.mark.parametrize("argv", [
    ["simulate", "--dist", THREE, "--n", "6", "--policy", "batch", "--b", "2", "--trials", "2000"],
    ["simulate", "--dist", THREE, "--n", "6", "--policy", "window-max", "--w", "2", "--trials", "2000"],
    ["simulate", "--dist", THREE, "--n", "6", "--policy", "window-A-prime", "--k", "2", "--trials", "2000"],
])
def test_other_policies_run(capsys, argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0 and len(rows(out)) == 1


def test_env_seed_is_the_default(capsys, monkeypatch):
    monkeypatch.setenv(SEED_ENV, "77")
    code, out, _ = run(capsys, "simulate", "--dist", THREE, "--n", "3", "--trials", "100")
    assert code == 0 and rows(out)[0]["seed"] == "77"
    monkeypatch.setenv(SEED_ENV, "seven")
    code, out, err = run(capsys, "simulate", "--dist", THREE, "--n", "3", "--trials", "100")
    assert code == 2 and out == "" and SEED_ENV in err


@pytest.mark.parametrize("argv,code", [
    (["ratio", "--dist", "0:0.5,1:0.6", "--n", "2"], 1),                 # probabilities do not sum to 1
    (["ratio", "--dist", "0:1", "--n", "2"], 1),                         # prophet value zero
    (["ratio", "--dist", "missing.json", "--n", "2"], 2),
    (["simulate", "--dist", THREE, "--n", "4", "--policy", "nope"], 2),
    (["simulate", "--dist", THREE, "--n", "4", "--policy", "batch"], 2),  # --b missing
    (["simulate", "--dist", THREE, "--n", "5", "--policy", "batch", "--b", "2"], 2),
    (["simulate", "--dist", THREE, "--n", "4", "--trials", "1"], 2),
    (["bounds", "--k", "10", "--hard-dir", "/no/such/dir"], 2),
    (["demo-noniid", "--n", "4", "--w", "4"], 1),
    (["frobnicate"], 2),
])
def test_exit_codes(capsys, argv, code):
    got, out, err = run(capsys, *argv)
    assert got == code
    assert out == "" and err.strip()


def test_full_visibility_message(capsys):
    _, _, err = run(capsys, "demo-noniid", "--n", "4", "--w", "4")
    assert "whole input" in err


def test_demo_noniid_values(capsys):
    code, out, _ = run(capsys, "demo-noniid")
    assert code == 0
    got = {float(json.loads(r["extra"])["eps"]): float(r["mean"]) for r in rows(out)}
    assert got[0.5] == pytest.approx(1 / 1.5, abs=1e-12)
    assert got[0.1] == pytest.approx(1 / 1.9, abs=1e-12)
    assert round(got[0.01], 6) == 0.502513


def test_bounds_table(capsys):
    code, out, _ = run(capsys, "bounds")
    assert code == 0
    table = rows(out)
    ks = [int(r["param"]) for r in table]
    assert ks == sorted(set(ks)) == [100, 1000, 10000]
    for r in table:
        assert float(r["mean"]) >= float(r["exact_reference"])
    k100 = json.loads(table[0]["extra"])
    # anchors: lower 0.74785 and tight upper 0.86095 at k = 100, reproduced to within the search's reach
    assert k100["lower"] == pytest.approx(0.74785, abs=0.005)
    assert k100["tight_upper"] == pytest.approx(0.86095, abs=0.02)


def test_bounds_paper_constant_source(capsys):
    code, out, _ = run(capsys, "bounds", "--k", "100", "1000", "--alpha-source", "paper-constant")
    assert code == 0
    for r in rows(out):
        extra = json.loads(r["extra"])
        assert extra["alpha_provenance"] == "paper-constant" and extra["tight_upper"] is None


def test_hardsearch_k1_witness_reimports(capsys, tmp_path):
    path = tmp_path / "w.json"
    code, out, _ = run(capsys, "hardsearch", "--k", "1", "--witness", str(path))
    assert code == 0 and float(rows(out)[0]["mean"]) == 1.0
    assert import_hard(path).alpha == 1.0


def test_hardsearch_k10_bracket(capsys, tmp_path):
    path = tmp_path / "w.json"
    code, out, _ = run(capsys, "hardsearch", "--k", "10", "--budget", "quick", "--witness", str(path))
    assert code == 0
    alpha = float(rows(out)[0]["mean"])
    assert 0.744 <= alpha <= 0.86
    assert import_hard(path).alpha == pytest.approx(alpha, abs=1e-12)


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "prophet_lab.cli", "ratio", "--dist", "0:0.5,1:0.5", "--n", "2"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith(",".join(COLUMNS))
