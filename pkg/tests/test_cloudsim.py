import json
import random
import warnings

import pytest

from socialss.cloudsim import (
    Action,
    SimConfig,
    init,
    reports_to_csv,
    reports_to_json,
    run,
    step,
    summarize,
    trace_from_reports,
)
from socialss.errors import ConfigError
from socialss.shamir import SharePoint, reconstruct
from socialss.trust import TrustClampWarning

IDS = ["P1", "P2", "P3", "P4"]


def config(weights=(2, 2, 2, 2), t=5, m=3, trace=None, **extra):
    profile = extra.pop("profile", {})
    providers = [{"id": f"P{i + 1}", "weight": w, **profile} for i, w in enumerate(weights)]
    obj = {"prime": 10007, "threshold": t, "max_weight": m, "seed": 42, "providers": providers, **extra}
    if trace is not None:
        obj["trace"] = {"players": [p["id"] for p in providers], "actions": [list(r) for r in trace]}
    return SimConfig.from_dict(obj)


def test_init_allocates_sequential_pool():
    state = init(config())
    assert sorted(state.scheme.live_xs()) == list(range(1, 9))
    assert state.scheme.weights() == dict.fromkeys(IDS, 2)
    assert all(r.trust.value == 0 for r in state.records.values())
    assert reconstruct(state.scheme.live_points(), 5) == state._secret


def test_config_rejects_light_weights():
    with pytest.raises(ConfigError):
        config(weights=(1, 1, 1), t=4, m=2)


@pytest.mark.parametrize(
    "bad",
    [
        {"prime": 15},
        {"max_weight": 5},
        {"mode": "other"},
        {"periods": -1},
    ],
)
def test_config_validation(bad):
    with pytest.raises(ConfigError):
        config(**bad)


def test_config_rejects_short_trace_rows():
    with pytest.raises(ConfigError):
        config(trace=["CCC"])


def test_empty_trace_gives_header_only():
    reports = run(config(trace=[]))
    assert reports == []
    assert reports_to_csv(reports) == "period,player,action,trust,class,weight,rt_ms\n"


def test_all_cooperative_period_is_a_fixed_point():
    state = init(config(trace=["CCCC"]))
    state, rep = step(state)
    assert rep.reconstructed and rep.matches_secret
    assert rep.trust == dict.fromkeys(IDS, 0.0)
    assert rep.weights == dict.fromkeys(IDS, 2)
    assert rep.classes == dict.fromkeys(IDS, "N")
    assert rep.delta == 4 and rep.reward_factor == 0.0


def test_reconstruction_fails_when_responders_are_too_light():
    reports = run(config(trace=["CCCC", "CCCD", "CCDD", "CCCC"]))
    ok = [r.reconstructed for r in reports]
    assert ok == [True, True, False, True]
    assert reports[2].responder_weight == 4 and reports[2].matches_secret is None
    assert reports[2].penalty_factor == 0.5
    assert all(r.matches_secret for r in reports if r.reconstructed)


def test_corruption_reboot():
    reports = run(config(trace=["CCCC", "CCCX", "CCCC", "CCCC"]))
    hit = reports[1]
    # tampered shares from P4 are rejected by the commitments
    assert hit.rejected_xs == [7, 8]
    assert hit.weights["P4"] == 0 and hit.trust["P4"] == 0.0
    assert hit.plan["revocations"] == ["P4"]
    assert hit.reconstructed and hit.matches_secret
    back = reports[2]
    assert back.readmitted == ["P4"]
    assert back.weights["P4"] == 1 and back.trust["P4"] == 0.0 and back.classes["P4"] == "N"
    assert reports[3].weights["P4"] == 1


def test_tampered_share_fails_verification():
    state = init(config())
    for pt in state.scheme.live_points():
        assert state.scheme.verify(pt)
        assert not state.scheme.verify(SharePoint(pt.x, pt.y + 1))


def chronic_trace(periods=50):
    return ["CCCD"] * periods


def test_chronic_defector_is_weighted_out():
    reports = run(config(trace=chronic_trace()))
    w4 = [r.weights["P4"] for r in reports]
    first_zero = w4.index(0)
    assert all(w == 0 for w in w4[first_zero:])
    assert all(r.classes["P4"] != "G" for r in reports)
    assert all(r.reconstructed and r.matches_secret for r in reports)
    assert all(r.corrupted_weight < 5 for r in reports)
    # cooperators climb to the cap
    assert reports[-1].weights["P1"] == 3


def test_determinism_same_seed_same_bytes():
    cfg = config(profile={"availability": 0.7, "jitter_ms": 30, "corruption": 0.02}, periods=80)
    assert reports_to_csv(run(cfg)) == reports_to_csv(run(cfg))
    assert reports_to_json(run(cfg)) == reports_to_json(run(cfg))


def test_replay_equivalence():
    cfg = config(profile={"availability": 0.6, "jitter_ms": 200, "base_ms": 60, "corruption": 0.03}, periods=120)
    sampled = run(cfg)
    assert {a for r in sampled for a in r.actions.values()} == {"C", "D", "X"}
    trace = trace_from_reports(sampled, IDS)
    replay_cfg = SimConfig.from_dict({**_raw(cfg), "trace": trace})
    assert replay_cfg.mode == "replay"
    assert reports_to_json(run(replay_cfg)) == reports_to_json(sampled)


def _raw(cfg):
    return {
        "prime": cfg.prime,
        "threshold": cfg.threshold,
        "max_weight": cfg.max_weight,
        "seed": cfg.seed,
        "deadline_ms": cfg.deadline_ms,
        "providers": [
            {
                "id": p.player_id,
                "weight": p.weight,
                "availability": p.availability_prob,
                "base_ms": p.base_ms,
                "jitter_ms": p.jitter_ms,
                "corruption": p.corruption_prob,
                "unit_cost": p.unit_cost,
            }
            for p in cfg.providers
        ],
    }


def test_sla_all_cooperative_within_thresholds():
    sla = {"max_hourly_cost": 100, "max_avg_rt_ms": 60, "max_rt_ms": 60}
    reports = run(config(trace=["CCCC"] * 50, sla=sla, profile={"base_ms": 40, "jitter_ms": 10, "unit_cost": 2.5}))
    assert all(not any(r.sla_violations.values()) for r in reports)
    assert {r.hourly_cost for r in reports} == {2.5 * 8}
    assert all(40 <= r.rt_max_ms <= 50 for r in reports)


def test_sla_threshold_is_inclusive():
    reports = run(config(trace=["CCCC"], sla={"max_hourly_cost": 8}))
    assert reports[0].hourly_cost == 8 and reports[0].sla_violations["hourly_cost"]


def test_late_answers_count_as_defection():
    cfg = config(periods=5, deadline_ms=100, profile={"base_ms": 150})
    reports = run(cfg)
    assert all(set(r.actions.values()) == {"D"} for r in reports)
    assert all(r.rt_ms["P1"] == 150 for r in reports)
    assert not any(r.reconstructed for r in reports)


def random_config(rng, periods):
    t = rng.randint(3, 8)
    m = rng.randint(1, t - 1)
    # enough providers that one corruption can be absorbed
    n = -(-t // m) + rng.randint(1, 3)
    weights = [rng.randint(0, m) for _ in range(n)]
    while sum(weights) < t + m:
        weights[rng.randrange(n)] = m
    return SimConfig.from_dict(
        {
            "prime": rng.choice([10007, 2**61 - 1]),
            "threshold": t,
            "max_weight": m,
            "periods": periods,
            "seed": rng.randrange(10**6),
            "providers": [
                {
                    "id": f"P{i}",
                    "weight": w,
                    "availability": rng.random(),
                    "jitter_ms": rng.uniform(0, 300),
                    "corruption": rng.choice([0.0, 0.0, rng.uniform(0, 0.05)]),
                }
                for i, w in enumerate(weights)
            ],
        }
    )


def test_randomized_runs_keep_invariants():
    rng = random.Random(7)
    periods = 0
    with warnings.catch_warnings():
        warnings.simplefilter("error", TrustClampWarning)
        while periods < 10_000:
            cfg = random_config(rng, 500)
            state = init(cfg)
            t = cfg.threshold
            retired = set()
            while not state.done:
                state, rep = step(state)
                periods += 1
                assert all(-1 <= v <= 1 for v in rep.trust.values())
                assert rep.corrupted_weight < t or rep.aborted
                if rep.reconstructed:
                    assert rep.responder_weight >= t and rep.matches_secret
                scheme = state.scheme
                live, gone = scheme.live_xs(), scheme.retired_xs
                assert not live & gone
                assert live | gone == set(range(1, scheme.next_x))
                assert retired <= gone
                retired = set(gone)
    assert periods >= 10_000


def test_summary_and_json_shape():
    reports = run(config(trace=["CCCC", "CCDD"]))
    s = summarize(reports)
    assert s == {"periods": 2, "reconstructions_ok": 1, "reconstructions_failed": 1, "sla_violations": 0, "aborted": 0}
    doc = json.loads(reports_to_json(reports))
    assert doc[1]["reconstruction"]["success"] is False
    assert doc[0]["factors"] == {"reward": 0.0, "penalty": 1.0}


def test_action_enum_values():
    assert [a.value for a in Action] == ["C", "D", "X"]


def test_losing_honest_threshold_aborts_with_flag():
    # t = 5 with weights (2, 2, 1): corrupting P1 leaves honest weight 3
    reports = run(config(weights=(2, 2, 1), trace=["CCC", "XCC", "CCC"]))
    assert len(reports) == 2
    assert reports[-1].aborted and "secret lost" in reports[-1].abort_reason
