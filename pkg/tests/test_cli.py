import json
import subprocess
import sys

import pytest

WIDE = "p,a,b,c\n0,1,,0\n1,1,1,\n2,,0,1\n3,0,1,1\n"


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "delib.cli", *args],
        capture_output=True,
        text=True,
    )


@pytest.fixture
def matrix_csv(tmp_path):
    path = tmp_path / "matrix.csv"
    path.write_text(WIDE)
    return str(path)


def test_slate_outputs_schema(matrix_csv):
    result = run_cli("slate", "--k", "2", "--rule", "harmonic", "--exact", "--input", matrix_csv)
    assert result.returncode == 0
    payload = json.loads(result.stdout)
    assert set(payload) >= {"ideas", "score", "rule", "violations"}
    assert payload["rule"] == "harmonic"
    assert len(payload["ideas"]) == 2


def test_slate_greedy_matches_exact_here(matrix_csv):
    exact = json.loads(run_cli("slate", "--k", "2", "--exact", "--input", matrix_csv).stdout)
    greedy = json.loads(run_cli("slate", "--k", "2", "--greedy", "--input", matrix_csv).stdout)
    assert greedy["score"] <= exact["score"] + 1e-9


def test_rank_proportional(matrix_csv):
    result = run_cli("rank", "--mode", "proportional", "--input", matrix_csv)
    assert result.returncode == 0
    payload = json.loads(result.stdout)
    order = [row["idea"] for row in payload]
    assert sorted(order) == [0, 1, 2]
    assert all("provenance" in row for row in payload)


def test_rank_elicitation(matrix_csv):
    result = run_cli("rank", "--mode", "elicitation", "--input", matrix_csv)
    assert result.returncode == 0


def test_rank_csv_format(matrix_csv):
    result = run_cli("rank", "--mode", "proportional", "--format", "csv", "--input", matrix_csv)
    assert result.returncode == 0
    lines = result.stdout.strip().splitlines()
    assert lines[0] == "position,idea,provenance"
    assert len(lines) == 4


def test_route_deterministic_per_seed(matrix_csv):
    a = run_cli("route", "--policy", "uniform", "--budget", "3", "--seed", "42", "--input", matrix_csv)
    b = run_cli("route", "--policy", "uniform", "--budget", "3", "--seed", "42", "--input", matrix_csv)
    assert a.returncode == 0
    assert a.stdout == b.stdout
    pairs = json.loads(a.stdout)
    assert len(pairs) == 3
    assert all(len(pair) == 2 for pair in pairs)
    c = run_cli("route", "--policy", "uncertainty", "--budget", "2", "--seed", "1", "--input", matrix_csv)
    assert len(json.loads(c.stdout)) == 2


def test_route_requires_seed(matrix_csv):
    result = run_cli("route", "--policy", "uniform", "--budget", "3", "--input", matrix_csv)
    assert result.returncode == 3


def test_landscape_writes_files(tmp_path, matrix_csv):
    out = tmp_path / "scape"
    result = run_cli(
        "landscape", "--k", "2", "--seed", "7", "--input", matrix_csv, "--out", str(out)
    )
    assert result.returncode == 0
    embedding = (out / "embedding.csv").read_text().splitlines()
    assert embedding[0] == "participant,x,y,cluster"
    assert len(embedding) == 5
    assert (out / "components.csv").exists()
    audit = json.loads((out / "audit.json").read_text())
    assert "blocking_coalitions" in audit


def test_audit_subcommand(matrix_csv):
    result = run_cli("audit", "--k", "2", "--input", matrix_csv)
    assert result.returncode == 0
    payload = json.loads(result.stdout)
    assert "violations" in payload


def test_import_polis(tmp_path):
    votes = tmp_path / "votes.csv"
    votes.write_text("participant,comment,vote\n0,0,1\n0,1,-1\n1,0,0\n")
    out = tmp_path / "matrix.csv"
    result = run_cli("import-polis", "--input", str(votes), "--out", str(out))
    assert result.returncode == 0
    report = json.loads(result.stdout)
    assert report["passes"] == 1
    assert out.exists()


def test_simulate_writes_outputs(tmp_path):
    config = {
        "population": {
            "n0": 6,
            "approval_radius": 3.0,
            "mixture": [{"weight": 1.0, "mean": [0.0, 0.0], "cov": 1.0}],
            "seed": 1,
        },
        "rounds": 2,
        "query_budget_per_round": 6,
        "initial_ideas": 3,
        "slate_k": 1,
        "landscape_k": 2,
        "seed": 4,
    }
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps(config))
    out = tmp_path / "run"
    result = run_cli("simulate", "--config", str(config_path), "--out", str(out))
    assert result.returncode == 0, result.stderr
    for name in ("timeline.csv", "timeline_long.csv", "summary.json"):
        assert (out / name).exists()


def test_exit_code_format_error(tmp_path):
    missing = str(tmp_path / "nope.csv")
    result = run_cli("slate", "--k", "2", "--input", missing)
    assert result.returncode == 2


def test_exit_code_parameter_error(matrix_csv):
    result = run_cli("slate", "--k", "0", "--input", matrix_csv)
    assert result.returncode == 3


def test_exit_code_capacity_error(tmp_path):
    header = "p," + ",".join(f"i{j}" for j in range(60))
    row = "0," + ",".join("1" for _ in range(60))
    path = tmp_path / "big.csv"
    path.write_text(header + "\n" + row + "\n")
    result = run_cli("slate", "--k", "30", "--exact", "--input", str(path))
    assert result.returncode == 4
    assert "cap" in result.stderr


def test_cli_outputs_reproducible(tmp_path, matrix_csv):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    for out in (out_a, out_b):
        run_cli("landscape", "--k", "2", "--seed", "3", "--input", matrix_csv, "--out", str(out))
    for name in ("embedding.csv", "components.csv", "audit.json"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()
