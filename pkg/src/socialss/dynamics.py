"""Dealer-free share evolution: proactive refresh, enrollment, disenrollment.

The free functions work on plain share lists and are what the tests compare
against their oracles.  :class:`SchemeState` strings them together for a
weighted scheme with per-player bundles, an epoch counter and commitments.
"""

from __future__ import annotations

import dataclasses
import random
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any, Hashable

from .errors import (
    DuplicateX,
    EpochMismatch,
    InconsistentShares,
    ReusedX,
    TooFewContributors,
    TooManyContributors,
    UnknownPlayer,
    UnknownX,
    ZeroX,
)
from .field import FieldElement, Modulus
from .shamir import (
    ShareBundle,
    ShareCommitment,
    SharePoint,
    commit,
    commit_all,
    interpolate_at,
    lagrange_coefficients,
    verify_share,
)


@dataclass(frozen=True)
class RefreshPolynomial:
    """``g(x) = g_1 x + ... + g_{t-1} x^{t-1}``; no constant term, so ``g(0) = 0``."""

    modulus: Modulus
    coefficients: tuple[int, ...]

    @classmethod
    def random(cls, t: int, modulus: Modulus, rng: random.Random) -> RefreshPolynomial:
        return cls(modulus, tuple(rng.randrange(modulus.p) for _ in range(t - 1)))

    @classmethod
    def zero(cls, t: int, modulus: Modulus) -> RefreshPolynomial:
        return cls(modulus, (0,) * (t - 1))

    def __call__(self, x: FieldElement | int) -> FieldElement:
        p = self.modulus.p
        xv = int(x) % p
        acc = 0
        for c in reversed(self.coefficients):
            acc = (acc + c) * xv % p
        return self.modulus(acc)


@dataclass(frozen=True)
class EpochTransition:
    kind: str
    old_epoch: int
    new_epoch: int
    retained_xs: frozenset[int]
    retired_xs: frozenset[int] = frozenset()
    enrolled_xs: frozenset[int] = frozenset()

    def to_json(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "old_epoch": self.old_epoch,
            "new_epoch": self.new_epoch,
            "retained_xs": sorted(self.retained_xs),
            "retired_xs": sorted(self.retired_xs),
            "enrolled_xs": sorted(self.enrolled_xs),
        }


def _check_commitments(
    shares: Sequence[SharePoint], commitments: Iterable[ShareCommitment] | None, epoch: int
) -> None:
    if commitments is None:
        return
    by_x = {c.x.value: c for c in commitments}
    for pt in shares:
        c = by_x.get(pt.x.value)
        if c is None:
            raise InconsistentShares(f"no commitment for x = {pt.x.value}")
        try:
            ok = verify_share(pt, c, epoch)
        except EpochMismatch as exc:
            raise InconsistentShares(str(exc)) from exc
        if not ok:
            raise InconsistentShares(f"share at x = {pt.x.value} fails its commitment")


def _check_on_one_polynomial(shares: Sequence[SharePoint], t: int) -> None:
    if len(shares) > t:
        try:
            interpolate_at(shares, t, 0, cross_check=True)
        except Exception as exc:
            raise InconsistentShares(str(exc)) from exc


def refresh(
    shares: Sequence[SharePoint],
    t: int,
    rng: random.Random,
    *,
    epoch: int = 0,
    commitments: Iterable[ShareCommitment] | None = None,
    g: RefreshPolynomial | None = None,
) -> tuple[list[SharePoint], list[ShareCommitment], EpochTransition]:
    """Move every share ``(x, y)`` to ``(x, y + g(x))`` and advance the epoch.

    ``commitments``, when given, must verify every share at ``epoch``.
    """
    shares = list(shares)
    _check_commitments(shares, commitments, epoch)
    _check_on_one_polynomial(shares, t)
    if not shares:
        raise InconsistentShares("nothing to refresh")
    modulus = shares[0].modulus
    if g is None:
        g = RefreshPolynomial.random(t, modulus, rng)
    new = [SharePoint(pt.x, pt.y + g(pt.x)) for pt in shares]
    transition = EpochTransition("refresh", epoch, epoch + 1, frozenset(pt.x.value for pt in shares))
    return new, commit_all(new, epoch + 1), transition


@dataclass(frozen=True)
class EnrollmentTranscript:
    """Messages of one enrollment run.

    ``pieces[j][k]`` is what contributor ``j`` sent to contributor ``k``;
    ``partial_sums[k]`` is what ``k`` forwarded to the newcomer.
    """

    contributor_xs: tuple[int, ...]
    x_new: int
    pieces: tuple[tuple[int, ...], ...]
    partial_sums: tuple[int, ...]
    point: SharePoint

    def received_by(self, k: int) -> list[int]:
        """Pieces contributor ``k`` got from the others."""
        return [row[k] for j, row in enumerate(self.pieces) if j != k]


def enroll_protocol(
    contributors: Sequence[SharePoint],
    x_new: FieldElement | int,
    rng: random.Random,
    *,
    t: int | None = None,
    used_xs: Iterable[int] = (),
) -> EnrollmentTranscript:
    """Give a newcomer the share at ``x_new`` without anyone learning another's share."""
    contributors = sorted(contributors, key=lambda pt: pt.x.value)
    if t is None:
        t = len(contributors)
    if len(contributors) < t or not contributors:
        raise TooFewContributors(f"{len(contributors)} contributors, need {t}")
    if len(contributors) > t:
        raise TooManyContributors(f"{len(contributors)} contributors, exactly {t} required")
    modulus = contributors[0].modulus
    p = modulus.p
    xs = [pt.x.value for pt in contributors]
    if len(set(xs)) != len(xs):
        raise DuplicateX("contributors must hold distinct x-coordinates")
    xn = int(x_new) % p
    if xn == 0:
        raise ZeroX("x = 0 is reserved for the secret")
    if xn in xs or xn in set(int(u) for u in used_xs):
        raise ReusedX(f"x = {xn} has been used before")

    lambdas = lagrange_coefficients(xs, xn, p)
    pieces = []
    for j, (lam, pt) in enumerate(zip(lambdas, contributors)):
        sigma = lam * pt.y.value % p
        row = [rng.randrange(p) if k != j else 0 for k in range(t)]
        row[j] = (sigma - sum(row)) % p
        pieces.append(tuple(row))
    partial = tuple(sum(pieces[j][k] for j in range(t)) % p for k in range(t))
    y = sum(partial) % p
    return EnrollmentTranscript(tuple(xs), xn, tuple(pieces), partial, SharePoint(modulus(xn), modulus(y)))


def enroll(
    contributors: Sequence[SharePoint],
    x_new: FieldElement | int,
    rng: random.Random,
    *,
    t: int | None = None,
    used_xs: Iterable[int] = (),
) -> SharePoint:
    return enroll_protocol(contributors, x_new, rng, t=t, used_xs=used_xs).point


def disenroll(
    shares: Sequence[SharePoint],
    revoked_x: FieldElement | int,
    t: int,
    rng: random.Random,
    *,
    epoch: int = 0,
    commitments: Iterable[ShareCommitment] | None = None,
    g: RefreshPolynomial | None = None,
) -> tuple[list[SharePoint], list[ShareCommitment], EpochTransition]:
    """Refresh every share except the one at ``revoked_x``, which is left stale.

    The returned share list excludes the revoked point.
    """
    shares = list(shares)
    rx = int(revoked_x)
    if rx not in {pt.x.value for pt in shares}:
        raise UnknownX(f"x = {rx} is not a live share")
    _check_commitments(shares, commitments, epoch)
    _check_on_one_polynomial(shares, t)
    kept = [pt for pt in shares if pt.x.value != rx]
    modulus = shares[0].modulus
    if g is None:
        g = RefreshPolynomial.random(t, modulus, rng)
    new = [SharePoint(pt.x, pt.y + g(pt.x)) for pt in kept]
    transition = EpochTransition(
        "disenroll", epoch, epoch + 1, frozenset(pt.x.value for pt in kept), frozenset({rx})
    )
    return new, commit_all(new, epoch + 1), transition


@dataclass
class SchemeState:
    """Live weighted sharing: bundles per player plus the bookkeeping around them."""

    modulus: Modulus
    t: int
    bundles: dict[Hashable, ShareBundle]
    epoch: int = 0
    commitments: dict[int, ShareCommitment] = field(default_factory=dict)
    retired_xs: set[int] = field(default_factory=set)
    next_x: int = 1
    transitions: list[EpochTransition] = field(default_factory=list)
    # superseded commitments, kept for audit only
    commitment_archive: list[ShareCommitment] = field(default_factory=list)
    _enrolled_since_epoch: set[int] = field(default_factory=set)

    @classmethod
    def from_bundles(cls, modulus: Modulus, t: int, bundles: Mapping[Hashable, ShareBundle]) -> SchemeState:
        state = cls(modulus, t, dict(bundles))
        xs = [pt.x.value for pt in state.live_points()]
        if len(set(xs)) != len(xs):
            raise DuplicateX("two bundles share an x-coordinate")
        state.next_x = max(xs, default=0) + 1
        state.commitments = {c.x.value: c for c in commit_all(state.live_points(), 0)}
        return state

    def copy(self) -> SchemeState:
        # Points, bundles, commitments and transitions are immutable, so
        # copying the containers is enough for an independent state.
        return dataclasses.replace(
            self,
            bundles=dict(self.bundles),
            commitments=dict(self.commitments),
            retired_xs=set(self.retired_xs),
            transitions=list(self.transitions),
            commitment_archive=list(self.commitment_archive),
            _enrolled_since_epoch=set(self._enrolled_since_epoch),
        )

    def live_points(self) -> list[SharePoint]:
        pts = [pt for b in self.bundles.values() for pt in b.points]
        return sorted(pts, key=lambda pt: pt.x.value)

    def live_xs(self) -> set[int]:
        return {pt.x.value for pt in self.live_points()}

    def used_xs(self) -> set[int]:
        return self.live_xs() | self.retired_xs

    def weight(self, player_id: Hashable) -> int:
        return self.bundle(player_id).weight

    def weights(self) -> dict[Hashable, int]:
        return {pid: b.weight for pid, b in self.bundles.items()}

    def bundle(self, player_id: Hashable) -> ShareBundle:
        try:
            return self.bundles[player_id]
        except KeyError:
            raise UnknownPlayer(f"unknown player {player_id!r}") from None

    def owner_of(self, x: int) -> Hashable:
        for pid, b in self.bundles.items():
            if any(pt.x.value == x for pt in b.points):
                return pid
        raise UnknownX(f"x = {x} is not live")

    def verify(self, point: SharePoint) -> bool:
        c = self.commitments.get(point.x.value)
        return c is not None and verify_share(point, c, self.epoch)

    def _install(self, new_points: Iterable[SharePoint], commitments: Iterable[ShareCommitment]) -> None:
        by_x = {pt.x.value: pt for pt in new_points}
        self.bundles = {
            pid: ShareBundle(pid, frozenset(by_x[pt.x.value] for pt in b.points if pt.x.value in by_x))
            for pid, b in self.bundles.items()
        }
        self.commitment_archive.extend(self.commitments.values())
        self.commitments = {c.x.value: c for c in commitments}

    def _stamp(self, tr: EpochTransition) -> EpochTransition:
        tr = EpochTransition(
            tr.kind,
            tr.old_epoch,
            tr.new_epoch,
            tr.retained_xs - self._enrolled_since_epoch,
            tr.retired_xs,
            frozenset(self._enrolled_since_epoch - tr.retired_xs),
        )
        self._enrolled_since_epoch = set()
        self.transitions.append(tr)
        return tr

    def refresh(self, rng: random.Random, g: RefreshPolynomial | None = None) -> EpochTransition:
        pts = self.live_points()
        new, comms, tr = refresh(pts, self.t, rng, epoch=self.epoch, commitments=self.commitments.values(), g=g)
        self._install(new, comms)
        self.epoch = tr.new_epoch
        return self._stamp(tr)

    def enroll(
        self, player_id: Hashable, contributor_order: Sequence[Hashable], rng: random.Random
    ) -> SharePoint:
        """Add one fresh point to ``player_id``.

        Contributors are the first ``t`` live points found walking
        ``contributor_order`` (each player's points in x order).
        """
        self.bundle(player_id)
        chosen: list[SharePoint] = []
        for pid in contributor_order:
            for pt in self.bundle(pid).sorted_points():
                if len(chosen) < self.t:
                    chosen.append(pt)
        if len(chosen) < self.t:
            raise TooFewContributors(f"only {len(chosen)} live points among contributors, need {self.t}")
        for pt in chosen:
            if not self.verify(pt):
                raise InconsistentShares(f"contributor share at x = {pt.x.value} fails its commitment")
        x_new = self.next_x
        if x_new >= self.modulus.p:
            raise ReusedX("x-pool exhausted")
        point = enroll(chosen, x_new, rng, t=self.t, used_xs=self.used_xs())
        self.next_x += 1
        b = self.bundles[player_id]
        self.bundles[player_id] = ShareBundle(player_id, b.points | {point})
        self.commitments[x_new] = commit(point, self.epoch)
        self._enrolled_since_epoch.add(x_new)
        return point

    def disenroll(
        self,
        player_id: Hashable,
        rng: random.Random,
        *,
        x: int | None = None,
        g: RefreshPolynomial | None = None,
    ) -> EpochTransition:
        """Revoke one of the player's points (default: the highest x)."""
        b = self.bundle(player_id)
        if x is None:
            if not b.points:
                raise UnknownX(f"{player_id!r} holds no shares")
            x = max(pt.x.value for pt in b.points)
        elif x not in {pt.x.value for pt in b.points}:
            raise UnknownX(f"{player_id!r} does not hold x = {x}")
        pts = self.live_points()
        new, comms, tr = disenroll(
            pts, x, self.t, rng, epoch=self.epoch, commitments=self.commitments.values(), g=g
        )
        self._install(new, comms)
        self.retired_xs.add(x)
        self.epoch = tr.new_epoch
        return self._stamp(tr)

    def revoke_all(self, player_id: Hashable, rng: random.Random) -> list[EpochTransition]:
        out = []
        while self.bundle(player_id).points:
            out.append(self.disenroll(player_id, rng))
        return out
