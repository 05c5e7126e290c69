"""Individual trust values in [-1, 1] and their piecewise-linear updates.

A player's trust ``x`` moves up by ``mu(x)`` after cooperating and down by
``mu_prime(x)`` after defecting.  Both curves are stitched together from
straight segments between six anchor points, controlled by:

* ``beta < alpha``: class boundaries (bad below ``beta``, good above ``alpha``)
* ``epsilon``: width of the tapers next to -1 and +1
* ``eta < theta < kappa``: small, plateau and large step sizes
"""

from __future__ import annotations

import enum
import math
import warnings
from collections.abc import Mapping, Sequence
from dataclasses import asdict, dataclass
from typing import Any

from .errors import DegenerateLine, EmptyList, InvalidTrustParams, OutOfRange


class TrustClampWarning(RuntimeWarning):
    """An update left [-1, 1] and had to be clamped."""


@dataclass(frozen=True)
class TrustParams:
    alpha: float = 0.3
    beta: float = -0.3
    epsilon: float = 0.1
    eta: float = 0.01
    theta: float = 0.05
    kappa: float = 0.09

    def __post_init__(self) -> None:
        a, b, e = self.alpha, self.beta, self.epsilon
        if not 0 < e < 1:
            raise InvalidTrustParams(f"epsilon must lie in (0, 1), got {e}")
        # e - 1 < beta keeps the penalize segment non-empty, mirroring alpha < 1 - e.
        if not (-1 < b and e - 1 < b < a < 1 - e):
            raise InvalidTrustParams(
                f"need epsilon-1 < beta < alpha < 1-epsilon, got beta={b}, alpha={a}, epsilon={e}"
            )
        if not 0 < self.eta < self.theta < self.kappa:
            raise InvalidTrustParams(
                f"need 0 < eta < theta < kappa, got {self.eta}, {self.theta}, {self.kappa}"
            )
        if self.kappa > e:
            raise InvalidTrustParams(f"kappa ({self.kappa}) must not exceed epsilon ({e})")

    @classmethod
    def from_dict(cls, obj: Mapping[str, Any]) -> TrustParams:
        unknown = set(obj) - set(cls.__dataclass_fields__)
        if unknown:
            raise InvalidTrustParams(f"unknown trust parameters: {sorted(unknown)}")
        return cls(**{k: float(v) for k, v in obj.items()})

    def to_dict(self) -> dict[str, float]:
        return asdict(self)


class PlayerClass(str, enum.Enum):
    BAD = "B"
    NEW = "N"
    GOOD = "G"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class TrustState:
    value: float = 0.0
    period: int = 0

    def __post_init__(self) -> None:
        if not -1.0 <= self.value <= 1.0:
            raise OutOfRange(f"trust {self.value} outside [-1, 1]")
        if self.period < 0:
            raise ValueError("period must be nonnegative")


def _check_range(x: float) -> None:
    if not -1.0 <= x <= 1.0:
        raise OutOfRange(f"trust {x} outside [-1, 1]")


def classify(x: float, params: TrustParams) -> PlayerClass:
    """B = [-1, beta), N = [beta, alpha], G = (alpha, 1]."""
    _check_range(x)
    if x < params.beta:
        return PlayerClass.BAD
    if x <= params.alpha:
        return PlayerClass.NEW
    return PlayerClass.GOOD


def line_through(p1: tuple[float, float], p2: tuple[float, float], x: float) -> float:
    (x1, y1), (x2, y2) = p1, p2
    if x1 == x2:
        raise DegenerateLine(f"both points have x = {x1}")
    return (y2 - y1) / (x2 - x1) * (x - x1) + y1


def mu(x: float, params: TrustParams) -> float:
    """Increment applied after cooperation."""
    _check_range(x)
    a, b, e = params.alpha, params.beta, params.epsilon
    eta, theta, kappa = params.eta, params.theta, params.kappa
    if x < b:  # encourage
        return line_through((-1.0, eta), (b, theta), x)
    if x <= a:  # give a chance
        return theta
    if x <= 1 - e:  # reward
        return line_through((a, theta), (1 - e, kappa), x)
    # Anchored at +1 so that x - 1 is exact and x + mu(x) cannot round past 1.
    return line_through((1.0, 0.0), (1 - e, kappa), x)


def mu_prime(x: float, params: TrustParams) -> float:
    """Decrement applied after defection."""
    _check_range(x)
    a, b, e = params.alpha, params.beta, params.epsilon
    eta, theta, kappa = params.eta, params.theta, params.kappa
    if x < e - 1:
        return line_through((-1.0, 0.0), (e - 1, kappa), x)
    if x < b:  # penalize
        return line_through((e - 1, kappa), (b, theta), x)
    if x <= a:  # take a chance
        return theta
    return line_through((a, theta), (1.0, eta), x)  # discourage


def step_value(x: float, cooperated: bool, params: TrustParams, scale: float = 1.0) -> float:
    """One update on a raw float; ``scale`` multiplies the increment or decrement."""
    raw = x + scale * mu(x, params) if cooperated else x - scale * mu_prime(x, params)
    if raw > 1.0 or raw < -1.0:
        warnings.warn(f"trust update {x} -> {raw} clamped to [-1, 1]", TrustClampWarning, stacklevel=2)
        raw = min(1.0, max(-1.0, raw))
    return raw


def update_individual(
    state: TrustState, cooperated: bool, params: TrustParams, cost_weight: float = 1.0
) -> TrustState:
    """``x + mu(x)`` on cooperation, ``x - mu'(x)`` on defection.

    ``cost_weight`` scales the step for transactions that matter more or
    less than usual.
    """
    if cost_weight < 0:
        raise ValueError("cost_weight must be nonnegative")
    return TrustState(step_value(state.value, cooperated, params, cost_weight), state.period + 1)


def reputation_from_pairwise(values: Sequence[float]) -> float:
    """Mean of the trust values the other players assign to one player."""
    if not values:
        raise EmptyList("no pairwise trust values")
    for v in values:
        _check_range(v)
    return math.fsum(values) / len(values)
