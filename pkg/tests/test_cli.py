"""Command-line client: files, exit codes, determinism, overrides."""

import json
import math

import pytest

from ringbalance.cli import (
    EXIT_DIAGNOSTIC,
    EXIT_INVALID_CONFIG,
    EXIT_OK,
    EXIT_VIOLATIONS,
    main,
)


def run_cli(*argv):
    return main(list(argv))


def test_run_writes_bundle(tmp_path, capsys):
    code = run_cli("run", "--seed", "42", "--out-dir", str(tmp_path))
    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert "status: ok" in out
    assert (tmp_path / "trajectory.csv").exists()
    assert (tmp_path / "summary.json").exists()
    assert (tmp_path / "config.txt").exists()
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["seed"] == 42 and summary["status"] == "ok"


def test_run_deterministic_bytes(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    assert run_cli("run", "--seed", "42", "--out-dir", str(a)) == EXIT_OK
    assert run_cli("run", "--seed", "42", "--out-dir", str(b)) == EXIT_OK
    assert (a / "trajectory.csv").read_bytes() == (b / "trajectory.csv").read_bytes()
    assert (a / "summary.json").read_bytes() == (b / "summary.json").read_bytes()


def test_run_invalid_config_names_clause(tmp_path, capsys):
    code = run_cli("run", "--k", "0.4", "--out-dir", str(tmp_path))
    assert code == EXIT_INVALID_CONFIG
    assert "Assumption 3" in capsys.readouterr().err


def test_run_not_converged_exit(tmp_path, capsys):
    code = run_cli("run", "--seed", "0", "--horizon", "40", "--out-dir", str(tmp_path))
    assert code == EXIT_DIAGNOSTIC
    # partial outputs still written
    assert (tmp_path / "trajectory.csv").exists()


def test_run_config_file_and_overrides(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "n_agents = 3\nomega0 = 0.01\nk_gain = 0.01\nphi = 0.02\n"
        "theta_max = 0.7\nseed = 5\ninit = sampled\n# comment line\n"
    )
    code = run_cli("run", "--config", str(cfg), "--seed", "8", "--out-dir", str(tmp_path))
    assert code == EXIT_OK
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["seed"] == 8  # flag override wins
    assert summary["n_agents"] == 3


def test_run_degrees_display_only(tmp_path, capsys):
    code = run_cli("run", "--seed", "1", "--degrees", "--out-dir", str(tmp_path))
    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert "deg" in out
    # files remain radians: phases in [-pi, pi)
    line = (tmp_path / "trajectory.csv").read_text().splitlines()[1]
    theta_1 = float(line.split(",")[1])
    assert -math.pi <= theta_1 < math.pi


def test_out_dir_env_default(tmp_path, monkeypatch, capsys):
    target = tmp_path / "from_env"
    monkeypatch.setenv("RINGBALANCE_OUT_DIR", str(target))
    assert run_cli("run", "--seed", "3") == EXIT_OK
    assert (target / "summary.json").exists()


def test_verify_ok(capsys):
    code = run_cli("verify", "--runs", "10", "--seed", "1")
    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert "verdict: PASS" in out


def test_verify_inject_fault_detected(capsys):
    # negative control: out-of-bound noise must trip the detector and the
    # violations must surface through the exit code
    code = run_cli("verify", "--runs", "6", "--seed", "1", "--inject-fault")
    assert code == EXIT_VIOLATIONS
    out = capsys.readouterr().out
    assert "soundness detections: 6" in out
    assert "verdict: FAIL" in out


def test_verify_bad_range(capsys):
    code = run_cli("verify", "--runs", "2", "--n-min", "2")
    assert code == EXIT_INVALID_CONFIG


def test_remote_mode_matches_local_bytes(tmp_path, monkeypatch):
    # route the client's HTTP calls through the in-process app: the remote
    # path must produce byte-identical files to local execution
    from fastapi.testclient import TestClient

    import ringbalance.cli as cli
    from ringbalance.service.app import app

    client = TestClient(app)

    def fake_post(server, path, payload):
        resp = client.post(path, json=payload)
        assert resp.status_code == 200
        return resp.json()

    monkeypatch.setattr(cli, "_post", fake_post)
    local = tmp_path / "local"
    remote = tmp_path / "remote"
    assert run_cli("run", "--seed", "11", "--out-dir", str(local)) == EXIT_OK
    assert run_cli("run", "--seed", "11", "--out-dir", str(remote),
                   "--server", "http://testserver") == EXIT_OK
    assert (local / "trajectory.csv").read_bytes() == (remote / "trajectory.csv").read_bytes()
    assert (local / "summary.json").read_bytes() == (remote / "summary.json").read_bytes()


def test_sweep_smoke(tmp_path, capsys):
    code = run_cli(
        "sweep", "--runs", "1", "--seed", "2", "--k-factors", "2,4",
        "--phi-factors", "2", "--out-dir", str(tmp_path),
    )
    assert code == EXIT_OK
    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    assert len(lines) == 1 + 2 + 2  # header + 2 cells + 2 aggregates
    out = capsys.readouterr().out
    assert "aggregates: 2" in out
