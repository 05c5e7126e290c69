"""Turning reputations into weights and realizing weight changes on the scheme."""

from __future__ import annotations

import enum
import random
from collections.abc import Callable, Collection, Iterable, Mapping
from dataclasses import dataclass, field
from typing import Any, Hashable

from .dynamics import SchemeState
from .errors import InvalidConstraints, UnknownPlayer, WouldBreakAccess, WouldBreakSafety
from .trust import PlayerClass, TrustState


class Status(str, enum.Enum):
    ACTIVE = "active"
    CORRUPTED = "corrupted"
    RETIRED = "retired"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class AccessConstraints:
    t: int
    m: int

    def __post_init__(self) -> None:
        if not 1 <= self.m < self.t:
            raise InvalidConstraints(f"need 1 <= m < t, got m={self.m}, t={self.t}")


@dataclass
class PlayerRecord:
    player_id: Hashable
    weight: int
    trust: TrustState = field(default_factory=TrustState)
    klass: PlayerClass = PlayerClass.NEW
    status: Status = Status.ACTIVE

    @property
    def honest(self) -> bool:
        return self.status is not Status.CORRUPTED


@dataclass(frozen=True)
class TuningPlan:
    increments: frozenset = frozenset()
    decrements: frozenset = frozenset()
    unchanged: frozenset = frozenset()
    revocations: frozenset = frozenset()  # full revocation of corrupted players

    def __post_init__(self) -> None:
        groups = [self.increments, self.decrements, self.unchanged, self.revocations]
        seen: set = set()
        for g in groups:
            if seen & g:
                raise ValueError(f"players {sorted(map(str, seen & g))} appear in two plan groups")
            seen |= g

    @property
    def is_empty(self) -> bool:
        return not (self.increments or self.decrements or self.revocations)

    def to_json(self) -> dict[str, Any]:
        return {
            "increments": sorted(map(str, self.increments)),
            "decrements": sorted(map(str, self.decrements)),
            "revocations": sorted(map(str, self.revocations)),
            "unchanged": sorted(map(str, self.unchanged)),
        }


def _weight_sum(records: Mapping[Hashable, PlayerRecord], members: Iterable[Hashable]) -> int:
    total = 0
    for pid in members:
        if pid not in records:
            raise UnknownPlayer(f"unknown player {pid!r}")
        total += records[pid].weight
    return total


def check_access(
    records: Mapping[Hashable, PlayerRecord], coalition: Collection[Hashable], constraints: AccessConstraints
) -> bool:
    """Can ``coalition`` reconstruct?"""
    return _weight_sum(records, coalition) >= constraints.t


def check_safety(
    records: Mapping[Hashable, PlayerRecord], corrupted: Collection[Hashable], constraints: AccessConstraints
) -> bool:
    """Is ``corrupted`` too light to reconstruct on its own?"""
    return _weight_sum(records, corrupted) < constraints.t


Policy = Callable[[Mapping[Hashable, PlayerRecord], AccessConstraints], TuningPlan]


def class_band_policy(records: Mapping[Hashable, PlayerRecord], constraints: AccessConstraints) -> TuningPlan:
    """G players gain one share up to the cap, B players lose one, N stays put.

    Corrupted players lose everything.
    """
    inc, dec, rev, same = set(), set(), set(), set()
    for pid, r in records.items():
        if r.status is Status.CORRUPTED:
            (rev if r.weight > 0 else same).add(pid)
        elif r.status is Status.RETIRED:
            same.add(pid)
        elif r.klass is PlayerClass.GOOD and r.weight < constraints.m:
            inc.add(pid)
        elif r.klass is PlayerClass.BAD and r.weight > 0:
            dec.add(pid)
        else:
            same.add(pid)
    return TuningPlan(frozenset(inc), frozenset(dec), frozenset(same), frozenset(rev))


def plan_weights(
    records: Mapping[Hashable, PlayerRecord],
    constraints: AccessConstraints,
    policy: Policy = class_band_policy,
) -> TuningPlan:
    return policy(records, constraints)


def projected_weights(
    records: Mapping[Hashable, PlayerRecord], plan: TuningPlan, constraints: AccessConstraints
) -> dict[Hashable, int]:
    out = {pid: r.weight for pid, r in records.items()}
    for pid in plan.increments | plan.decrements | plan.revocations | plan.unchanged:
        if pid not in out:
            raise UnknownPlayer(f"plan mentions unknown player {pid!r}")
    for pid in plan.increments:
        out[pid] += 1
        if out[pid] > constraints.m:
            raise ValueError(f"increment would push {pid!r} above the cap {constraints.m}")
    for pid in plan.decrements:
        out[pid] -= 1
        if out[pid] < 0:
            raise ValueError(f"decrement would make the weight of {pid!r} negative")
    for pid in plan.revocations:
        out[pid] = 0
    return out


def repair_plan(plan: TuningPlan) -> TuningPlan:
    """Fallback for a plan that would leave honest weight below ``t``: keep
    increments and revocations, drop decrements.

    Increments can only raise the honest weight and revocations touch
    corrupted players only, so this succeeds whenever the current honest
    weight is still at least ``t``.
    """
    return TuningPlan(plan.increments, frozenset(), plan.unchanged | plan.decrements, plan.revocations)


def contributor_order(records: Mapping[Hashable, PlayerRecord]) -> list[Hashable]:
    """Active players, most trusted first; ties broken by id."""
    active = [r for r in records.values() if r.status is Status.ACTIVE]
    active.sort(key=lambda r: (-r.trust.value, str(r.player_id)))
    return [r.player_id for r in active]


def apply_plan(
    scheme: SchemeState,
    plan: TuningPlan,
    rng: random.Random,
    records: Mapping[Hashable, PlayerRecord],
    constraints: AccessConstraints,
) -> SchemeState:
    """Realize ``plan`` on a copy of ``scheme`` and return the copy.

    Enrollments run first (on the current polynomial), then one disenrollment
    per decrement, then full revocations, then a global refresh.  ``scheme``
    itself is never modified; a rejected plan raises before any work is done.
    """
    for pid, r in records.items():
        if pid not in scheme.bundles:
            raise UnknownPlayer(f"record for {pid!r} has no bundle")
        if r.weight != scheme.weight(pid):
            raise ValueError(f"record weight of {pid!r} disagrees with its bundle")
    projected = projected_weights(records, plan, constraints)
    honest = sum(w for pid, w in projected.items() if records[pid].honest)
    corrupted = sum(w for pid, w in projected.items() if not records[pid].honest)
    if honest < constraints.t:
        raise WouldBreakAccess(f"honest weight would drop to {honest} < t = {constraints.t}")
    if corrupted >= constraints.t:
        raise WouldBreakSafety(f"corrupted weight would be {corrupted} >= t = {constraints.t}")

    new = scheme.copy()
    order = contributor_order(records)
    for pid in sorted(plan.increments, key=str):
        new.enroll(pid, order, rng)
    for pid in sorted(plan.decrements, key=str):
        new.disenroll(pid, rng)
    for pid in sorted(plan.revocations, key=str):
        new.revoke_all(pid, rng)
    new.refresh(rng)

    after = new.weights()
    assert after == projected, (after, projected)
    return new
