import json
import os
from pathlib import Path

import pytest

import wargamer

DEMO = Path(os.environ.get("WARGAMER_DEMO_DIR", Path(__file__).resolve().parents[2] / "data" / "demo"))


def load(name):
    return json.loads((DEMO / name).read_text())


@pytest.fixture(scope="module")
def scenario():
    return load("scenario.json")


def test_validate_demo_pair(scenario):
    report = wargamer.validate(scenario, load("integrated_plan.json"))
    assert not [f for f in report if f["severity"] == "error"]


def test_validation_errors_carry_findings(scenario):
    plan = load("integrated_plan.json")
    plan["horizonTicks"] = 10
    report = wargamer.validate(scenario, plan)
    assert "horizon-exceeded" in {f["code"] for f in report}
    with pytest.raises(wargamer.ValidationError) as err:
        wargamer.run(scenario, plan)
    assert "horizon-exceeded" in str(err.value)
    assert isinstance(err.value, ValueError)


def test_empty_plan_has_no_effects(scenario):
    result = wargamer.run(scenario, load("empty_plan.json"), horizon=104, seed=3, noise=True)
    assert result["effects"] == []


def test_run_is_deterministic_and_redetectable(scenario):
    plan = load("integrated_plan.json")
    a = wargamer.run(scenario, plan, horizon=104, seed=42, noise=True)
    b = wargamer.run(scenario, plan, horizon=104, seed=42, noise=True)
    assert a == b
    assert a["effects"]
    meta = a["metadata"]
    again = wargamer.detect_effects(a["baseline"], a["plan"], meta["effectThreshold"], meta["effectPersistence"])
    assert len(again) == len(a["effects"])


def test_unknown_hypothesis(scenario):
    with pytest.raises(KeyError):
        wargamer.run(scenario, load("empty_plan.json"), hypothesis="no-such-view")


def test_compare_ranks_integrated_first(scenario):
    plans = [load(n) for n in ("empty_plan.json", "integrated_plan.json", "security_plan.json")]
    out = wargamer.compare(scenario, plans, load("effects.json"), horizon=104)
    assert out["ranking"][0]["planId"] == plans[1]["id"]
    assert {r["planId"] for r in out["robustness"]} == {p["id"] for p in plans}


def test_sync_matrix_has_rows():
    m = wargamer.sync_matrix(load("integrated_plan.json"), 4)
    assert json.dumps(m)


def test_numeric_analytics():
    assert wargamer.tlx_score([100, 80, 60, 40, 20, 0], [5, 4, 3, 2, 1, 0]) == pytest.approx(73.3333333333, abs=1e-9)
    t = wargamer.trend([(1, 1), (2, 2), (3, 2), (4, 3)])
    assert t["slope"] == pytest.approx(0.6) and t["r_squared"] == pytest.approx(0.9) and t["df"] == 2
    assert wargamer.trust_score([7] * 13, [False] * 13) == 7
    assert wargamer.trust_score([7] * 13, [True] * 13) == 1
    with pytest.raises(ValueError):
        wargamer.tlx_score([1, 2, 3], [5, 4, 3, 2, 1, 0])
    p = wargamer.paired_t([5, 6, 7, 8], [4, 4, 6, 6])
    assert p["slope"] == pytest.approx(1.5) and p["df"] == 3


def test_pfnet_drops_indirect_link():
    body = {"concepts": ["a", "b", "c"], "distances": [[0, 1, 3], [1, 0, 1], [3, 1, 0]], "q": 2, "r": "inf"}
    net = wargamer.analytics("pfnet", body)
    assert {tuple(sorted((l["a"], l["b"]))) for l in net["links"]} == {("a", "b"), ("b", "c")}
    with pytest.raises(KeyError):
        wargamer.analytics("nope", {})
