import json
import subprocess
import sys

import pytest

from graphhist.cli import DEFAULTS, main


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def k4_file(tmp_path):
    path = tmp_path / "k4.txt"
    path.write_text("n 4\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n")
    return str(path)


def test_fdeg(k4_file, capsys):
    code, out, _ = run(["fdeg", "--graph", k4_file, "--pattern", "triangle"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["command"] == "fdeg"
    assert rep["result"]["raw_degrees"] == [3, 3, 3, 3] and rep["result"]["b_max"] == 3


def test_density_exact_string(k4_file, capsys):
    code, out, _ = run(["density", "--graph", k4_file, "--pattern", "path3"], capsys)
    assert code == 0 and json.loads(out)["result"]["exact"] == "1"


def test_config_merge_and_flag_override(tmp_path, k4_file, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"pattern": "triangle", "delta": "0.1,0.2", "d": 3}))
    code, out, _ = run(["radii", "--config", str(cfg), "--d", "2"], capsys)
    rep = json.loads(out)
    assert code == 0
    assert rep["config"]["d"] == 2 and rep["config"]["pattern"] == "triangle"
    assert rep["config"]["seed"] == DEFAULTS["seed"]
    assert len(rep["result"]["rows"]) == 4


def test_csv_output(capsys):
    code, out, _ = run(["radii", "--pattern", "edge", "--delta", "0.1,0.2", "--d", "1",
                        "--format", "csv"], capsys)
    lines = out.strip().splitlines()
    assert code == 0 and lines[0].startswith("delta,m,gamma") and len(lines) == 3


def test_csv_without_rows_is_invalid(k4_file, capsys):
    code, _, err = run(["density", "--graph", k4_file, "--pattern", "edge", "--format", "csv"],
                       capsys)
    assert code == 2 and json.loads(err)["error"] == "invalid_input"


def test_output_file(tmp_path, capsys):
    dest = tmp_path / "out.json"
    code, out, _ = run(["oracle", "count-hist", "--n", "5", "--pattern", "triangle",
                        "--delta", "0.5", "-o", str(dest)], capsys)
    assert code == 0 and out == ""
    rep = json.loads(dest.read_text())
    assert rep["result"]["count"] == rep["result"]["rows"][0]["count"]


def test_maxent_and_infeasible_exit(capsys):
    code, out, _ = run(["maxent", "--family", "edge", "--phi", "0.3", "--gamma", "0", "--k", "4",
                        "--starts", "4"], capsys)
    assert code == 0 and json.loads(out)["result"]["excess"] <= 1e-6
    code, _, err = run(["maxent", "--family", "edge,triangle", "--phi", "0.1,0.9",
                        "--gamma", "0,0", "--k", "4", "--starts", "2"], capsys)
    diag = json.loads(err)
    assert code == 3 and diag["error"] == "infeasible" and "detail" in diag


def test_cap_exit(capsys):
    code, _, err = run(["oracle", "count-hist", "--n", "9", "--pattern", "triangle",
                        "--delta", "0.5"], capsys)
    assert code == 4 and json.loads(err)["error"] == "cap_exceeded"


def test_k_cap_exit(tmp_path, capsys):
    import numpy as np
    rng = np.random.default_rng(0)
    n = 40
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.5]
    path = tmp_path / "g.json"
    path.write_text(json.dumps({"n": n, "edges": edges}))
    code, _, err = run(["szemeredi", "--graph", str(path), "--eps", "0.05", "--k-cap", "2",
                        "--k-init", "2"], capsys)
    diag = json.loads(err)
    assert code == 4 and "partial_partition" in diag["detail"]


def test_invalid_inputs(capsys):
    assert run(["radii", "--pattern", "edge"], capsys)[0] == 2
    assert run(["radii", "--pattern", "edge", "--delta", "1.5"], capsys)[0] == 2
    assert run(["fdeg", "--graph", "/nonexistent", "--pattern", "edge"], capsys)[0] == 2
    assert run(["nosuch"], capsys)[0] == 2
    assert run(["radii", "--pattern", "nosuch", "--delta", "0.1"], capsys)[0] == 2


def test_sandwich_timing_flag(capsys):
    base = ["oracle", "sandwich", "--n", "5", "--pattern", "triangle", "--delta", "0.4"]
    _, out, _ = run(base, capsys)
    assert "elapsed" not in json.loads(out)["result"]
    _, out, _ = run(base + ["--timing"], capsys)
    assert "elapsed" in json.loads(out)["result"]


def test_deterministic_output(k4_file, capsys):
    argv = ["bounds", "densities", "--family", "triangle", "--phi", "0.2", "--gamma", "0.01",
            "--k", "4", "--eps", "0.01", "--n", "1000", "--starts", "4"]
    _, a, _ = run(argv, capsys)
    _, b, _ = run(argv, capsys)
    assert a == b


def test_audit_task(tmp_path, capsys):
    t = tmp_path / "type.json"
    t.write_text(json.dumps({"k": 4, "eps": 0.1,
                             "S": [[0 if i == j else 0.5 for j in range(4)] for i in range(4)]}))
    code, out, _ = run(["oracle", "audit", "--type", str(t), "--pattern", "triangle", "--g", "20",
                        "--trials", "2"], capsys)
    assert code == 0 and json.loads(out)["result"]["trials"] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "graphhist.cli", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "0.1.0"
