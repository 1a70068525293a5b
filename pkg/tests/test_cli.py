"""Command-line interface: exit codes, run files, reproducibility."""

import json
import os

import pytest

from loghop.cli import main

CONFIG = """
[model]
d = 1
epsilon = 0.05

[model.kernel]
kind = "log-power"
gamma = 1.0
rho = 2.0

[model.disorder]
kind = "uniform"
M = 1.0

[geometry]
L = 5
l = 2
alpha = 1.3

[msa]
p = 6.0
kappa0 = 0.2
kappa_inf = 0.1
rho_prime = 1.5
energy_interval = [-0.5, 0.5]
grid_points = 3

[execution]
seeds = [0]
trials = 10
"""


@pytest.fixture
def cfg(tmp_path):
    f = tmp_path / "run.toml"
    f.write_text(CONFIG)
    return str(f)


def run_files(out_dir):
    sub = next(p for p in out_dir.iterdir() if p.is_dir())
    return sub, sorted(f.name for f in sub.iterdir())


def test_quasi_metric_writes_run(tmp_path):
    rc = main([
        "quasi-metric", "--rho", "2.0", "--n-max", "2", "--samples", "100",
        "--seed", "1", "--out", str(tmp_path),
    ])
    assert rc == 0
    sub, names = run_files(tmp_path)
    assert names == ["manifest.json", "records.jsonl", "summary.csv"]
    manifest = json.loads((sub / "manifest.json").read_text())
    assert manifest["command"] == "quasi-metric"
    assert set(manifest["outputs"]) <= set(names)
    records = [json.loads(line) for line in (sub / "records.jsonl").read_text().splitlines()]
    assert len(records) == 2
    assert records[1]["violations"] == 0


def test_records_are_reproducible(tmp_path):
    a_dir = tmp_path / "a"
    b_dir = tmp_path / "b"
    for out in (a_dir, b_dir):
        rc = main([
            "quasi-metric", "--rho", "2.0", "--n-max", "2", "--samples", "200",
            "--seed", "3", "--out", str(out),
        ])
        assert rc == 0
    a = run_files(a_dir)[0] / "records.jsonl"
    b = run_files(b_dir)[0] / "records.jsonl"
    assert a.read_bytes() == b.read_bytes()


def test_wegner_command(tmp_path, cfg):
    rc = main([
        "wegner", "--config", cfg, "--eps", "0.001", "--trials", "50",
        "--out", str(tmp_path / "w"),
    ])
    assert rc == 0
    sub, names = run_files(tmp_path / "w")
    assert "records.jsonl" in names
    rec = json.loads((sub / "records.jsonl").read_text().splitlines()[0])
    assert rec["trials"] == 50


def test_ladder_command(tmp_path):
    rc = main([
        "ladder", "--gamma", "1", "--rho", "2", "--rho-prime", "1.5",
        "--alpha", "1.3", "--p", "6", "--kappa0", "0.2", "--kappa-inf", "0.1",
        "--horizon", "20", "--out", str(tmp_path),
    ])
    assert rc == 0
    sub, names = run_files(tmp_path)
    assert "trajectory.csv" in names
    manifest = json.loads((sub / "manifest.json").read_text())
    assert "trajectory.csv" in manifest["outputs"]


def test_cover_check_command(tmp_path):
    rc = main([
        "cover-check", "--l", "1", "--d", "1", "--trials", "10", "--seed", "2",
        "--out", str(tmp_path),
    ])
    assert rc == 0


def test_missing_config_is_validation_error(tmp_path):
    rc = main(["wegner", "--eps", "0.001", "--out", str(tmp_path)])
    assert rc == 2


def test_missing_rho_is_validation_error(tmp_path):
    rc = main(["quasi-metric", "--out", str(tmp_path)])
    assert rc == 2


def test_precondition_violation_exits_2(tmp_path, cfg):
    # config has l=2, L=5, and 26*2 > 5
    rc = main(["pair-resonance", "--config", cfg, "--out", str(tmp_path)])
    assert rc == 2


def test_refusal_exits_3(tmp_path, cfg):
    rc = main([
        "eigen-decay", "--config", cfg, "--side", "6001", "--out", str(tmp_path),
    ])
    assert rc == 3


def test_out_env_var(tmp_path, cfg, monkeypatch):
    monkeypatch.setenv("LOGHOP_OUT", str(tmp_path / "envout"))
    rc = main(["cover-check", "--l", "1", "--d", "1", "--trials", "5", "--seed", "2"])
    assert rc == 0
    assert (tmp_path / "envout").is_dir()
