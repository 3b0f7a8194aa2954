import csv
import os
import pathlib
import subprocess

import pytest

CLI = os.environ.get("SELGOV_CLI", str(pathlib.Path(__file__).resolve().parents[2] / "build" / "selgov"))

pytestmark = pytest.mark.skipif(not pathlib.Path(CLI).exists(), reason="selgov CLI not built")


def cli(*args):
    return subprocess.run([CLI, *args], capture_output=True, text=True)


def test_run_writes_outputs_and_replays(tmp_path):
    r = cli("run", "--scenario", "payments_monitoring", "--mode", "incentivized", "--seed", "2",
            "--horizon", "60", "--paired", "--out-dir", str(tmp_path))
    assert r.returncode == 0, r.stderr
    stem = "payments_monitoring_incentivized_lr0.05_seed2"
    log = tmp_path / f"audit_{stem}.jsonl"
    summary = tmp_path / f"summary_{stem}.csv"
    assert log.exists() and summary.exists()
    assert len((tmp_path / f"traj_sc_{stem}.csv").read_text().splitlines()) == 62
    assert len((tmp_path / f"traj_top_share_{stem}.csv").read_text().splitlines()) == 61
    rep = cli("replay", str(log), "--summary", str(summary))
    assert rep.returncode == 0, rep.stderr


def test_sweep_summary(tmp_path):
    r = cli("sweep", "--scenarios", "fraud_detection", "--modes", "static,unconstrained_rl",
            "--lrs", "0.01,0.05", "--seeds", "0,1,2", "--horizon", "40", "--out-dir", str(tmp_path))
    assert r.returncode == 0, r.stderr
    rows = list(csv.DictReader((tmp_path / "summary.csv").open()))
    assert len(rows) == 4
    assert list(rows[0].keys()) == ["scenario", "mode", "lr", "mean_reward", "mean_SC", "SC_0", "SC_T", "RSC",
                                    "var_SC", "GSI", "GD_dynamic"]
    assert {row["GD_dynamic"] for row in rows} == {"0"}
    trajectories = sorted(p.name for p in tmp_path.glob("traj_*.csv"))
    assert len(trajectories) == 8


def test_bad_arguments_fail_loudly(tmp_path):
    r = cli("run", "--mode", "greedy", "--out-dir", str(tmp_path))
    assert r.returncode == 2
    assert "InvalidArgument" in r.stderr
