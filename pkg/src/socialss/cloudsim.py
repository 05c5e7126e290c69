"""Discrete-period simulation of cloud providers holding weighted shares.

Each period every provider either cooperates (C: answers on time with its
shares), defects (D: no answer, or an answer after the deadline) or is
corrupted (X: compromised, submits tampered shares, gets rebooted).  A
server then tries to reconstruct the secret from the C answers, trust is
updated socially, and weights are retuned through enroll/disenroll/refresh.

Randomness comes from independent streams derived from the seed, and every
provider consumes the same three draws per period whatever its action, so a
recorded action matrix replayed against the same seed reproduces the run.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
import random
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .dynamics import SchemeState
from .errors import ConfigError, SocialSSError
from .field import FieldElement, Modulus
from .shamir import SharePoint, reconstruct, verify_share, weighted_deal
from .social import social_factors, social_step
from .trust import PlayerClass, TrustParams, TrustState, classify
from .tuning import (
    AccessConstraints,
    PlayerRecord,
    Status,
    apply_plan,
    check_safety,
    contributor_order,
    plan_weights,
    repair_plan,
)

CSV_COLUMNS = ("period", "player", "action", "trust", "class", "weight", "rt_ms")

# 2**61 - 1
DEFAULT_PRIME = 2305843009213693951


class Action(str, enum.Enum):
    COOPERATE = "C"
    DEFECT = "D"
    CORRUPT = "X"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ProviderProfile:
    player_id: str
    weight: int
    availability_prob: float = 1.0
    base_ms: float = 50.0
    jitter_ms: float = 0.0
    corruption_prob: float = 0.0
    unit_cost: float = 1.0

    def __post_init__(self) -> None:
        for name in ("availability_prob", "corruption_prob"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{self.player_id}: {name} = {v} outside [0, 1]")
        if self.base_ms < 0 or self.jitter_ms < 0:
            raise ConfigError(f"{self.player_id}: latencies must be nonnegative")
        if self.unit_cost < 0:
            raise ConfigError(f"{self.player_id}: unit_cost must be nonnegative")
        if self.weight < 0:
            raise ConfigError(f"{self.player_id}: negative weight")


@dataclass(frozen=True)
class SLA:
    max_hourly_cost: float = math.inf
    max_avg_rt_ms: float = math.inf
    max_rt_ms: float = math.inf


@dataclass(frozen=True)
class SimConfig:
    providers: tuple[ProviderProfile, ...]
    threshold: int
    max_weight: int
    prime: int = DEFAULT_PRIME
    trust: TrustParams = field(default_factory=TrustParams)
    periods: int = 50
    seed: int = 0
    deadline_ms: float = 200.0
    sla: SLA = field(default_factory=SLA)
    mode: str = "sampled"
    trace: tuple[tuple[Action, ...], ...] | None = None
    secret: int | None = None

    def __post_init__(self) -> None:
        try:
            Modulus(self.prime)
            AccessConstraints(self.threshold, self.max_weight)
        except SocialSSError as exc:
            raise ConfigError(str(exc)) from exc
        if not self.providers:
            raise ConfigError("no providers")
        ids = [p.player_id for p in self.providers]
        if len(set(ids)) != len(ids):
            raise ConfigError("provider ids must be unique")
        for p in self.providers:
            if p.weight > self.max_weight:
                raise ConfigError(f"{p.player_id}: weight {p.weight} exceeds cap m = {self.max_weight}")
        total = sum(p.weight for p in self.providers)
        if total < self.threshold:
            raise ConfigError(f"total initial weight {total} is below the threshold {self.threshold}")
        if self.periods < 0:
            raise ConfigError("periods must be nonnegative")
        if self.mode not in ("sampled", "replay"):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.mode == "replay":
            if self.trace is None:
                raise ConfigError("replay mode needs a trace")
            for row in self.trace:
                if len(row) != len(self.providers):
                    raise ConfigError(f"trace row has {len(row)} actions for {len(self.providers)} providers")

    @property
    def horizon(self) -> int:
        return len(self.trace) if self.mode == "replay" and self.trace is not None else self.periods

    @property
    def constraints(self) -> AccessConstraints:
        return AccessConstraints(self.threshold, self.max_weight)

    @classmethod
    def from_dict(cls, obj: Mapping[str, Any]) -> SimConfig:
        try:
            providers = tuple(
                ProviderProfile(
                    player_id=str(p["id"]),
                    weight=int(p["weight"]),
                    availability_prob=float(p.get("availability", 1.0)),
                    base_ms=float(p.get("base_ms", 50.0)),
                    jitter_ms=float(p.get("jitter_ms", 0.0)),
                    corruption_prob=float(p.get("corruption", 0.0)),
                    unit_cost=float(p.get("unit_cost", 1.0)),
                )
                for p in obj["providers"]
            )
            sla = obj.get("sla", {})
            trace = None
            if obj.get("trace") is not None:
                trace = parse_trace(obj["trace"], [p.player_id for p in providers])
            return cls(
                providers=providers,
                threshold=int(obj["threshold"]),
                max_weight=int(obj["max_weight"]),
                prime=int(obj.get("prime", DEFAULT_PRIME)),
                trust=TrustParams.from_dict(obj.get("trust", {})),
                periods=int(obj.get("periods", 50)),
                seed=int(obj.get("seed", 0)),
                deadline_ms=float(obj.get("deadline_ms", 200.0)),
                sla=SLA(
                    float(sla.get("max_hourly_cost", math.inf)),
                    float(sla.get("max_avg_rt_ms", math.inf)),
                    float(sla.get("max_rt_ms", math.inf)),
                ),
                mode=str(obj.get("mode", "replay" if trace is not None else "sampled")),
                trace=trace,
                secret=None if obj.get("secret") is None else int(obj["secret"]),
            )
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"malformed config: {exc!r}") from exc
        except SocialSSError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def load(cls, path: str | Path) -> SimConfig:
        try:
            obj = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        return cls.from_dict(obj)


def parse_trace(obj: Mapping[str, Any], player_ids: Sequence[str]) -> tuple[tuple[Action, ...], ...]:
    """``{"players": [...], "actions": [["C", "D", ...], ...]}`` -> rows in provider order."""
    players = [str(p) for p in obj.get("players", player_ids)]
    if sorted(players) != sorted(player_ids):
        raise ConfigError("trace players do not match the configured providers")
    pos = [players.index(pid) for pid in player_ids]
    rows = []
    for row in obj["actions"]:
        if isinstance(row, str):
            row = list(row)
        if len(row) != len(players):
            raise ConfigError(f"trace row {row!r} does not cover all {len(players)} players")
        try:
            rows.append(tuple(Action(str(row[i])) for i in pos))
        except ValueError as exc:
            raise ConfigError(f"bad action in trace row {row!r}") from exc
    return tuple(rows)


@dataclass
class PeriodReport:
    period: int
    actions: dict[str, str]
    delta: int
    n_social: int
    reward_factor: float | None
    penalty_factor: float | None
    trust: dict[str, float]
    classes: dict[str, str]
    weights: dict[str, int]
    responders: list[str]
    responder_weight: int
    reconstructed: bool
    matches_secret: bool | None
    rejected_xs: list[int]
    rt_ms: dict[str, float | None]
    rt_avg_ms: float | None
    rt_max_ms: float | None
    hourly_cost: float
    sla_violations: dict[str, bool]
    epoch: int
    epoch_transitions: list[dict[str, Any]]
    plan: dict[str, Any] | None
    plan_rejected: str | None = None
    readmitted: list[str] = field(default_factory=list)
    corrupted_weight: int = 0
    aborted: bool = False
    abort_reason: str | None = None

    def to_json(self) -> dict[str, Any]:
        return {
            "period": self.period,
            "actions": self.actions,
            "delta": self.delta,
            "n": self.n_social,
            "factors": {"reward": self.reward_factor, "penalty": self.penalty_factor},
            "trust": self.trust,
            "classes": self.classes,
            "weights": self.weights,
            "reconstruction": {
                "success": self.reconstructed,
                "value_matches_secret": self.matches_secret,
                "responders": self.responders,
                "responder_weight": self.responder_weight,
                "rejected_xs": self.rejected_xs,
            },
            "rt_ms": self.rt_ms,
            "rt_stats": {"avg_ms": self.rt_avg_ms, "max_ms": self.rt_max_ms},
            "hourly_cost": self.hourly_cost,
            "sla_violations": self.sla_violations,
            "epoch": self.epoch,
            "epoch_transitions": self.epoch_transitions,
            "plan": self.plan,
            "plan_rejected": self.plan_rejected,
            "readmitted": self.readmitted,
            "corrupted_weight": self.corrupted_weight,
            "aborted": self.aborted,
            "abort_reason": self.abort_reason,
        }

    def csv_rows(self) -> list[tuple]:
        return [
            (
                self.period,
                pid,
                self.actions[pid],
                repr(self.trust[pid]),
                self.classes[pid],
                self.weights[pid],
                "" if self.rt_ms[pid] is None else repr(self.rt_ms[pid]),
            )
            for pid in self.actions
        ]


@dataclass
class SimState:
    config: SimConfig
    scheme: SchemeState
    records: dict[str, PlayerRecord]
    period: int = 0
    pending_reboot: list[str] = field(default_factory=list)
    aborted: bool = False
    behavior_rng: random.Random = field(default_factory=random.Random, repr=False)
    protocol_rng: random.Random = field(default_factory=random.Random, repr=False)
    # Ground truth for checking reconstructions; never handed to providers.
    _secret: FieldElement | None = field(default=None, repr=False)

    @property
    def done(self) -> bool:
        return self.aborted or self.period >= self.config.horizon

    def trust_vector(self) -> dict[str, float]:
        return {pid: r.trust.value for pid, r in self.records.items()}

    def _sync_weights(self) -> None:
        for pid, r in self.records.items():
            r.weight = self.scheme.weight(pid)


def init(config: SimConfig) -> SimState:
    """Deal the initial weighted sharing; the dealer keeps nothing afterwards."""
    modulus = Modulus(config.prime)
    protocol_rng = random.Random(f"{config.seed}/protocol")
    behavior_rng = random.Random(f"{config.seed}/behavior")
    secret_value = config.secret if config.secret is not None else protocol_rng.randrange(modulus.p)
    secret = modulus(secret_value)
    weights = {p.player_id: p.weight for p in config.providers}
    bundles = weighted_deal(secret, config.threshold, weights, protocol_rng, cap=config.max_weight)
    scheme = SchemeState.from_bundles(modulus, config.threshold, bundles)
    records = {
        p.player_id: PlayerRecord(p.player_id, p.weight, TrustState(0.0, 0), PlayerClass.NEW, Status.ACTIVE)
        for p in config.providers
    }
    return SimState(config, scheme, records, behavior_rng=behavior_rng, protocol_rng=protocol_rng, _secret=secret)


def _draw(state: SimState, profile: ProviderProfile) -> tuple[Action, float, bool]:
    rng = state.behavior_rng
    u_corrupt, u_avail, u_jitter = rng.random(), rng.random(), rng.random()
    latency = profile.base_ms + profile.jitter_ms * u_jitter
    available = u_avail < profile.availability_prob
    if u_corrupt < profile.corruption_prob:
        action = Action.CORRUPT
    elif available and latency <= state.config.deadline_ms:
        action = Action.COOPERATE
    else:
        action = Action.DEFECT
    return action, latency, available


def _tampered(point: SharePoint) -> SharePoint:
    return SharePoint(point.x, point.y + 1)


def step(state: SimState) -> tuple[SimState, PeriodReport]:
    """Advance one period.  ``state`` is updated in place and returned."""
    if state.done:
        raise RuntimeError("simulation already finished")
    cfg = state.config
    t = cfg.threshold
    state.period += 1
    period = state.period
    scheme_start = len(state.scheme.transitions)
    abort_reason = None

    # (0) rebooted providers come back as newcomers holding one share
    readmitted = []
    for pid in state.pending_reboot:
        rec = state.records[pid]
        try:
            state.scheme.enroll(pid, contributor_order(state.records), state.protocol_rng)
        except SocialSSError as exc:
            abort_reason = f"cannot readmit {pid}: {exc}"
            break
        rec.status = Status.ACTIVE
        rec.trust = TrustState(0.0, period - 1)
        rec.klass = PlayerClass.NEW
        readmitted.append(pid)
    state.pending_reboot = [pid for pid in state.pending_reboot if pid not in readmitted]
    state._sync_weights()

    # (1) actions
    actions: dict[str, Action] = {}
    rt: dict[str, float | None] = {}
    for i, prof in enumerate(cfg.providers):
        sampled, latency, available = _draw(state, prof)
        action = cfg.trace[period - 1][i] if cfg.mode == "replay" and cfg.trace is not None else sampled
        actions[prof.player_id] = action
        if action is Action.DEFECT:
            rt[prof.player_id] = latency if available and latency > cfg.deadline_ms else None
        else:
            rt[prof.player_id] = latency

    # (2) corruption: tampered shares are caught, the provider is rebooted
    rejected: list[int] = []
    for pid, action in actions.items():
        if action is Action.CORRUPT:
            rec = state.records[pid]
            rec.status = Status.CORRUPTED
            rec.trust = TrustState(0.0, period)
            rec.klass = PlayerClass.NEW
            for pt in state.scheme.bundle(pid).sorted_points():
                bad = _tampered(pt)
                if not verify_share(bad, state.scheme.commitments[pt.x.value], state.scheme.epoch):
                    rejected.append(pt.x.value)
    corrupted_ids = [pid for pid, r in state.records.items() if r.status is Status.CORRUPTED]
    corrupted_weight = sum(state.records[pid].weight for pid in corrupted_ids)
    if not check_safety(state.records, corrupted_ids, cfg.constraints):
        abort_reason = abort_reason or f"corrupted weight {corrupted_weight} reaches t = {t}"
    honest_weight = sum(r.weight for r in state.records.values() if r.status is Status.ACTIVE)
    if honest_weight < t:
        abort_reason = abort_reason or f"honest weight {honest_weight} < t = {t}: secret lost to the honest providers"

    # (3) reconstruction from the cooperative answers
    responders = [pid for pid, a in actions.items() if a is Action.COOPERATE]
    points = [
        pt
        for pid in responders
        for pt in state.scheme.bundle(pid).sorted_points()
        if state.scheme.verify(pt)
    ]
    responder_weight = len(points)
    reconstructed = responder_weight >= t
    matches = None
    if reconstructed:
        value = reconstruct(points, t, cross_check=True)
        matches = value == state._secret
        del value
    del points  # the server erases its working copies

    # (4) social trust update over the C/D players
    social_ids = [
        pid for pid, a in actions.items() if a is not Action.CORRUPT and state.records[pid].status is Status.ACTIVE
    ]
    delta_ = sum(actions[pid] is Action.COOPERATE for pid in social_ids)
    reward = penalty = None
    if social_ids:
        r, p = social_factors(delta_, len(social_ids))
        reward, penalty = float(r), float(p)
        new_values = social_step(
            [state.records[pid].trust.value for pid in social_ids],
            [actions[pid] is Action.COOPERATE for pid in social_ids],
            cfg.trust,
        )
        for pid, v in zip(social_ids, new_values):
            state.records[pid].trust = TrustState(v, period)
    for rec in state.records.values():
        if rec.status is Status.ACTIVE:
            rec.klass = classify(rec.trust.value, cfg.trust)

    # (5) retune weights
    plan_json = None
    plan_rejected = None
    if abort_reason is None:
        plan = plan_weights(state.records, cfg.constraints)
        try:
            state.scheme = apply_plan(state.scheme, plan, state.protocol_rng, state.records, cfg.constraints)
        except SocialSSError as exc:
            plan_rejected = f"{type(exc).__name__}: {exc}"
            plan = repair_plan(plan)
            try:
                state.scheme = apply_plan(state.scheme, plan, state.protocol_rng, state.records, cfg.constraints)
            except SocialSSError as exc2:
                abort_reason = f"cannot retune weights: {exc2}"
        plan_json = plan.to_json()
        state._sync_weights()
        for pid in corrupted_ids:
            if state.records[pid].weight == 0 and abort_reason is None:
                state.records[pid].status = Status.RETIRED
                state.pending_reboot.append(pid)

    # (6) SLA metrics
    seen = [v for v in rt.values() if v is not None]
    rt_avg = math.fsum(seen) / len(seen) if seen else None
    rt_max = max(seen) if seen else None
    cost = math.fsum(p.unit_cost * state.records[p.player_id].weight for p in cfg.providers)
    violations = {
        "hourly_cost": cost >= cfg.sla.max_hourly_cost,
        "avg_rt": rt_avg is not None and rt_avg >= cfg.sla.max_avg_rt_ms,
        "max_rt": rt_max is not None and rt_max >= cfg.sla.max_rt_ms,
    }

    if abort_reason is not None:
        state.aborted = True
    report = PeriodReport(
        period=period,
        actions={pid: a.value for pid, a in actions.items()},
        delta=delta_,
        n_social=len(social_ids),
        reward_factor=reward,
        penalty_factor=penalty,
        trust=state.trust_vector(),
        classes={pid: r.klass.value for pid, r in state.records.items()},
        weights={pid: r.weight for pid, r in state.records.items()},
        responders=responders,
        responder_weight=responder_weight,
        reconstructed=reconstructed,
        matches_secret=matches,
        rejected_xs=sorted(rejected),
        rt_ms=rt,
        rt_avg_ms=rt_avg,
        rt_max_ms=rt_max,
        hourly_cost=cost,
        sla_violations=violations,
        epoch=state.scheme.epoch,
        epoch_transitions=[tr.to_json() for tr in state.scheme.transitions[scheme_start:]],
        plan=plan_json,
        plan_rejected=plan_rejected,
        readmitted=readmitted,
        corrupted_weight=corrupted_weight,
        aborted=state.aborted,
        abort_reason=abort_reason,
    )
    return state, report


def run(config: SimConfig) -> list[PeriodReport]:
    state = init(config)
    reports = []
    while not state.done:
        state, report = step(state)
        reports.append(report)
    return reports


def reports_to_csv(reports: Sequence[PeriodReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rep in reports:
        writer.writerows(rep.csv_rows())
    return buf.getvalue()


def reports_to_json(reports: Sequence[PeriodReport]) -> str:
    return json.dumps([r.to_json() for r in reports], indent=2) + "\n"


def trace_from_reports(reports: Sequence[PeriodReport], player_ids: Sequence[str]) -> dict[str, Any]:
    return {"players": list(player_ids), "actions": [[r.actions[pid] for pid in player_ids] for r in reports]}


def summarize(reports: Sequence[PeriodReport]) -> dict[str, int]:
    return {
        "periods": len(reports),
        "reconstructions_ok": sum(r.reconstructed and bool(r.matches_secret) for r in reports),
        "reconstructions_failed": sum(not r.reconstructed or r.matches_secret is False for r in reports),
        "sla_violations": sum(any(r.sla_violations.values()) for r in reports),
        "aborted": sum(r.aborted for r in reports),
    }
