import json
import math

import pytest

selgov = pytest.importorskip("selgov")


def test_capped_simplex_examples():
    assert selgov.project_capped_simplex([0.7, 0.2, 0.1], 0.1, 0.5) == pytest.approx([0.5, 0.3, 0.2], abs=1e-12)
    assert selgov.project_capped_simplex([0.85, 0.05, 0.10], 0.1, 1.0) == pytest.approx([0.8, 0.1, 0.1], abs=1e-12)
    with pytest.raises(selgov.SelgovError, match="InfeasibleConstraintSet"):
        selgov.project_capped_simplex([0.5, 0.5], 0.6, 0.9)


def test_small_helpers():
    e2 = math.exp(2.0)
    assert selgov.policy([2.0, 0.0], 1.0) == pytest.approx([e2 / (e2 + 1), 1 / (e2 + 1)])
    assert selgov.variance_clamp([0.9, 0.1], 0.18) == pytest.approx([0.68, 0.32])
    assert selgov.rsc(0.259, 0.942) == pytest.approx(0.683)
    assert selgov.token_hash("fraud") == 0x4CAB70FEA2B6E9E0
    with pytest.raises(selgov.SelgovError, match="UndefinedGSI"):
        selgov.gsi(0.1, 0.0)


def test_fixtures_and_config():
    fx = selgov.default_fixtures()
    assert len(fx["agents"]) == 7
    assert [s["name"] for s in fx["scenarios"]] == ["fraud_detection", "payments_monitoring", "qbr_analysis"]
    cfg = selgov.default_config()
    assert cfg["horizon"] == 250


def test_run_is_deterministic_and_replayable(tmp_path):
    a = selgov.run(scenario="fraud_detection", mode="incentivized", seed=3, horizon=80, paired=True)
    b = selgov.run(scenario="fraud_detection", mode="incentivized", seed=3, horizon=80, paired=True)
    assert a["audit_log"] == b["audit_log"]
    assert len(a["sc_series"]) == 81
    path = tmp_path / "log.jsonl"
    path.write_text(a["audit_log"])
    assert selgov.replay(path) == a["summary"]
    first = json.loads(a["audit_log"].splitlines()[0])
    assert first["record"] == "run"


def test_unknown_config_key_is_rejected():
    with pytest.raises(selgov.SelgovError, match="ParseError"):
        selgov.run(learning_rate=0.1)


def test_sweep_shape():
    cells = selgov.sweep(scenarios=["qbr_analysis"], modes=["static", "incentivized"], lrs=[0.05],
                         seeds=[0, 1], base={"horizon": 30})
    assert [c["summary"]["mode"] for c in cells] == ["static", "incentivized"]
    assert all(len(c["per_seed"]) == 2 and not c["errors"] for c in cells)
    assert cells[0]["summary"]["RSC"] == 0.0
