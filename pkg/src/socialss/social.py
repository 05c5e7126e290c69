"""Population-aware trust update.

With ``delta`` cooperators out of ``n`` players, a cooperator's increment is
scaled by ``1 - delta/n`` and a defector's decrement by ``delta/n``: being
one of many cooperators earns little, defecting against a cooperative crowd
costs a lot, and unanimous behaviour changes nothing.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import LengthMismatch
from .trust import TrustParams, TrustState, step_value


@dataclass(frozen=True)
class ActionVector:
    cooperated: tuple[bool, ...]

    def __post_init__(self) -> None:
        if not self.cooperated:
            raise ValueError("an action vector needs at least one player")

    @classmethod
    def from_string(cls, pattern: str) -> ActionVector:
        """``"CCDC"`` style; anything other than C/D is rejected."""
        bad = set(pattern) - {"C", "D"}
        if bad:
            raise ValueError(f"actions must be C or D, got {sorted(bad)}")
        return cls(tuple(ch == "C" for ch in pattern))

    @property
    def n(self) -> int:
        return len(self.cooperated)

    def __len__(self) -> int:
        return len(self.cooperated)


def delta(actions: ActionVector) -> int:
    return sum(actions.cooperated)


def social_factors(delta_: int, n: int) -> tuple[Fraction, Fraction]:
    """(reward factor, penalty factor) = (1 - delta/n, delta/n), exact."""
    if n < 1 or not 0 <= delta_ <= n:
        raise ValueError(f"need 0 <= delta <= n and n >= 1, got delta={delta_}, n={n}")
    ratio = Fraction(delta_, n)
    return 1 - ratio, ratio


@lru_cache(maxsize=4096)
def _float_factors(delta_: int, n: int) -> tuple[float, float]:
    reward, penalty = social_factors(delta_, n)
    return float(reward), float(penalty)


def social_step(values: Sequence[float], cooperated: Sequence[bool], params: TrustParams) -> list[float]:
    """Float-level core of :func:`social_update`."""
    if len(values) != len(cooperated):
        raise LengthMismatch(f"{len(values)} trust values vs {len(cooperated)} actions")
    rf, pf = _float_factors(sum(cooperated), len(cooperated))
    return [step_value(x, c, params, rf if c else pf) for x, c in zip(values, cooperated)]


def social_update(states: Sequence[TrustState], actions: ActionVector, params: TrustParams) -> list[TrustState]:
    new = social_step([s.value for s in states], actions.cooperated, params)
    return [TrustState(v, s.period + 1) for v, s in zip(new, states)]
