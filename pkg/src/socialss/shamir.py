"""Shamir dealing, Lagrange reconstruction and weighted allocation.

Shares are ``SharePoint(x, y)`` with ``y = P(x)`` for a polynomial ``P`` of
degree ``t - 1`` whose constant term is the secret.  A player's weight is the
number of points in its :class:`ShareBundle`.

The default randomness source is :class:`random.Random`, which is fine for a
simulator and wrong for a vault.
"""

from __future__ import annotations

import hashlib
import random
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from typing import Any, Hashable

from .errors import (
    CorruptShareSuspected,
    DuplicateX,
    EpochMismatch,
    InsufficientShares,
    ModulusMismatch,
    PoolExhausted,
    TooFewPoints,
    WeightExceedsCap,
    ZeroX,
)
from .field import FieldElement, Modulus, inv_mod

HASH_ALGORITHM = "sha256"


@dataclass(frozen=True)
class SharePoint:
    x: FieldElement
    y: FieldElement

    def __post_init__(self) -> None:
        if self.x.modulus.p != self.y.modulus.p:
            raise ModulusMismatch("share coordinates live in different fields")
        if self.x.value == 0:
            raise ZeroX("x = 0 is reserved for the secret")

    @property
    def modulus(self) -> Modulus:
        return self.x.modulus

    def to_json(self, epoch: int) -> dict[str, Any]:
        return {"x": str(self.x.value), "y": str(self.y.value), "p": str(self.x.p), "epoch": epoch}

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> SharePoint:
        modulus = Modulus(int(obj["p"]))
        return cls(modulus(int(obj["x"])), modulus(int(obj["y"])))

    def __repr__(self) -> str:
        return f"SharePoint({self.x.value}, {self.y.value} mod {self.x.p})"


def make_point(x: int, y: int, modulus: Modulus) -> SharePoint:
    return SharePoint(modulus(x), modulus(y))


@dataclass(frozen=True)
class ShareBundle:
    player_id: Hashable
    points: frozenset[SharePoint]

    def __post_init__(self) -> None:
        xs = [pt.x.value for pt in self.points]
        if len(set(xs)) != len(xs):
            raise DuplicateX(f"bundle of {self.player_id!r} repeats an x-coordinate")

    @property
    def weight(self) -> int:
        return len(self.points)

    def sorted_points(self) -> list[SharePoint]:
        return sorted(self.points, key=lambda pt: pt.x.value)


@dataclass(frozen=True)
class ShareCommitment:
    x: FieldElement
    epoch: int
    digest: str
    algorithm: str = HASH_ALGORITHM

    def to_json(self) -> dict[str, Any]:
        return {"x": str(self.x.value), "epoch": self.epoch, "algorithm": self.algorithm, "digest": self.digest}

    @classmethod
    def from_json(cls, obj: Mapping[str, Any], modulus: Modulus) -> ShareCommitment:
        return cls(modulus(int(obj["x"])), int(obj["epoch"]), str(obj["digest"]), str(obj.get("algorithm", HASH_ALGORITHM)))


def _digest(p: int, epoch: int, x: int, y: int) -> str:
    return hashlib.new(HASH_ALGORITHM, f"{p}|{epoch}|{x}|{y}".encode()).hexdigest()


def commit(point: SharePoint, epoch: int) -> ShareCommitment:
    # Plain hash, so over a tiny field y is brute-forceable from the digest.
    return ShareCommitment(point.x, epoch, _digest(point.x.p, epoch, point.x.value, point.y.value))


def commit_all(points: Iterable[SharePoint], epoch: int) -> list[ShareCommitment]:
    return [commit(pt, epoch) for pt in points]


def commit_secret(secret: FieldElement) -> str:
    return hashlib.new(HASH_ALGORITHM, f"secret|{secret.p}|{secret.value}".encode()).hexdigest()


def verify_share(point: SharePoint, commitment: ShareCommitment, epoch: int) -> bool:
    """True iff ``point`` matches ``commitment``; the commitment must belong to ``epoch``."""
    if commitment.epoch != epoch:
        raise EpochMismatch(f"commitment from epoch {commitment.epoch}, scheme is at epoch {epoch}")
    if commitment.x.value != point.x.value or commitment.x.p != point.x.p:
        return False
    expected = _digest(point.x.p, epoch, point.x.value, point.y.value)
    return commitment.algorithm == HASH_ALGORITHM and expected == commitment.digest


class SecretPolynomial:
    """Dealer-side polynomial ``a_0 + a_1 x + ... + a_{t-1} x^{t-1}``.

    Lives only for the duration of a deal; ``repr`` never shows coefficients.
    """

    __slots__ = ("coefficients",)

    def __init__(self, coefficients: Sequence[FieldElement]):
        if not coefficients:
            raise ValueError("a polynomial needs at least the constant term")
        p = coefficients[0].p
        if any(c.p != p for c in coefficients):
            raise ModulusMismatch("coefficients live in different fields")
        self.coefficients = tuple(coefficients)

    @classmethod
    def random(cls, secret: FieldElement, t: int, rng: random.Random) -> SecretPolynomial:
        # Every coefficient uniform, including a zero leading one; the scheme
        # is only perfect when a_{t-1} = 0 is allowed.
        modulus = secret.modulus
        return cls([secret] + [modulus(rng.randrange(modulus.p)) for _ in range(t - 1)])

    @property
    def threshold(self) -> int:
        return len(self.coefficients)

    @property
    def modulus(self) -> Modulus:
        return self.coefficients[0].modulus

    def __call__(self, x: FieldElement | int) -> FieldElement:
        p = self.modulus.p
        xv = int(x) % p
        acc = 0
        for c in reversed(self.coefficients):
            acc = (acc * xv + c.value) % p
        return self.modulus(acc)

    def __repr__(self) -> str:
        return f"SecretPolynomial(t={self.threshold}, p={self.modulus.p})"


def _check_xs(xs: Sequence[FieldElement], t: int) -> None:
    if t < 1:
        raise ValueError(f"threshold must be at least 1, got {t}")
    values = [x.value for x in xs]
    if any(v == 0 for v in values):
        raise ZeroX("x = 0 is reserved for the secret")
    if len(set(values)) != len(values):
        raise DuplicateX("x-coordinates must be distinct")
    if len(xs) < t:
        raise TooFewPoints(f"{len(xs)} points cannot carry a threshold of {t}")


def deal_polynomial(
    poly: SecretPolynomial, xs: Sequence[FieldElement], *, epoch: int = 0
) -> tuple[list[SharePoint], list[ShareCommitment]]:
    _check_xs(xs, poly.threshold)
    points = [SharePoint(x, poly(x)) for x in xs]
    return points, commit_all(points, epoch)


def deal(
    secret: FieldElement,
    t: int,
    xs: Sequence[FieldElement],
    rng: random.Random,
    *,
    epoch: int = 0,
) -> tuple[list[SharePoint], list[ShareCommitment]]:
    """Deal ``secret`` at ``xs`` with a fresh random polynomial of degree ``t - 1``."""
    _check_xs(xs, t)
    return deal_polynomial(SecretPolynomial.random(secret, t, rng), xs, epoch=epoch)


def deal_with_coefficients(
    coefficients: Sequence[FieldElement], xs: Sequence[FieldElement], *, epoch: int = 0
) -> tuple[list[SharePoint], list[ShareCommitment]]:
    """Deterministic dealing from explicit coefficients ``a_0 .. a_{t-1}``.

    Only meant for reproducing worked examples.
    """
    return deal_polynomial(SecretPolynomial(coefficients), xs, epoch=epoch)


def lagrange_coefficients(xs: Sequence[int], at: int, p: int) -> list[int]:
    """Weights ``l_j`` with ``P(at) = sum_j l_j * P(xs[j])`` for deg P < len(xs)."""
    coeffs = []
    for j, xj in enumerate(xs):
        num = den = 1
        for m, xm in enumerate(xs):
            if m != j:
                num = num * (at - xm) % p
                den = den * (xj - xm) % p
        coeffs.append(num * inv_mod(den, p) % p)
    return coeffs


def _canonical(shares: Iterable[SharePoint], t: int) -> list[SharePoint]:
    pts = sorted(shares, key=lambda pt: pt.x.value)
    if not pts:
        raise InsufficientShares(f"no shares given, need {t}")
    p = pts[0].x.p
    if any(pt.x.p != p for pt in pts):
        raise ModulusMismatch("shares live in different fields")
    for a, b in zip(pts, pts[1:]):
        if a.x.value == b.x.value:
            raise DuplicateX(f"x = {a.x.value} appears more than once")
    if len(pts) < t:
        raise InsufficientShares(f"{len(pts)} distinct shares, need {t}")
    return pts


def interpolate_at(
    shares: Iterable[SharePoint], t: int, x_target: FieldElement | int, *, cross_check: bool = False
) -> FieldElement:
    """Value at ``x_target`` of the degree ``t - 1`` interpolant through the first ``t`` shares by x.

    With ``cross_check`` every extra share must also lie on that interpolant,
    otherwise :class:`CorruptShareSuspected` is raised.
    """
    if t < 1:
        raise ValueError(f"threshold must be at least 1, got {t}")
    pts = _canonical(shares, t)
    modulus = pts[0].modulus
    p = modulus.p
    used, extra = pts[:t], pts[t:]
    xs = [pt.x.value for pt in used]

    def at(x0: int) -> int:
        weights = lagrange_coefficients(xs, x0, p)
        return sum(w * pt.y.value for w, pt in zip(weights, used)) % p

    if cross_check:
        bad = [pt.x.value for pt in extra if at(pt.x.value) != pt.y.value]
        if bad:
            raise CorruptShareSuspected(f"shares at x = {bad} do not lie on the interpolant")
    return modulus(at(int(x_target) % p))


def reconstruct(shares: Iterable[SharePoint], t: int, *, cross_check: bool = False) -> FieldElement:
    return interpolate_at(shares, t, 0, cross_check=cross_check)


def allocate_xs(weights: Mapping[Hashable, int], modulus: Modulus, first_x: int = 1) -> dict[Hashable, list[FieldElement]]:
    """Hand out consecutive x-coordinates starting at ``first_x``, in mapping order."""
    total = sum(weights.values())
    if first_x < 1:
        raise ZeroX("x-pool must start at 1 or above")
    if first_x + total - 1 >= modulus.p:
        raise PoolExhausted(f"{total} shares from x = {first_x} do not fit below p = {modulus.p}")
    out: dict[Hashable, list[FieldElement]] = {}
    nxt = first_x
    for pid, w in weights.items():
        out[pid] = [modulus(nxt + k) for k in range(w)]
        nxt += w
    return out


def weighted_deal(
    secret: FieldElement,
    t: int,
    weights: Mapping[Hashable, int],
    rng: random.Random,
    *,
    cap: int | None = None,
    first_x: int = 1,
) -> dict[Hashable, ShareBundle]:
    """Deal ``weights[i]`` points of one polynomial to each player ``i``."""
    for pid, w in weights.items():
        if w < 0:
            raise ValueError(f"negative weight for {pid!r}")
        if cap is not None and w > cap:
            raise WeightExceedsCap(f"{pid!r} has weight {w} > cap {cap}")
    xs_by_player = allocate_xs(weights, secret.modulus, first_x)
    all_xs = [x for xs in xs_by_player.values() for x in xs]
    points, _ = deal(secret, t, all_xs, rng)
    by_x = {pt.x.value: pt for pt in points}
    return {
        pid: ShareBundle(pid, frozenset(by_x[x.value] for x in xs))
        for pid, xs in xs_by_player.items()
    }
