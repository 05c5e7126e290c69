"""Exact arithmetic in Z_p for primes below 2**64."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

from .errors import CompositeModulus, ModulusMismatch, TooSmall, ZeroInverse

MAX_MODULUS_BITS = 64

# Deterministic for every n < 3.3 * 10**24, which covers all 64-bit inputs.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for 64-bit integers."""
    if n < 2:
        return False
    for q in _MR_WITNESSES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class Modulus:
    p: int

    def __post_init__(self) -> None:
        if not isinstance(self.p, int) or isinstance(self.p, bool):
            raise TypeError(f"modulus must be an int, got {type(self.p).__name__}")
        if self.p < 3:
            raise TooSmall(f"modulus {self.p} is smaller than 3")
        if self.p.bit_length() > MAX_MODULUS_BITS:
            raise TooSmall(f"modulus {self.p} does not fit in {MAX_MODULUS_BITS} bits")
        if not is_prime(self.p):
            raise CompositeModulus(f"modulus {self.p} is not prime")

    def __call__(self, value: int) -> FieldElement:
        """Canonical element for an arbitrary integer."""
        return FieldElement(value % self.p, self)

    @property
    def zero(self) -> FieldElement:
        return FieldElement(0, self)

    @property
    def one(self) -> FieldElement:
        return FieldElement(1, self)


def validate_modulus(candidate: int) -> Modulus:
    return Modulus(candidate)


@dataclass(frozen=True)
class FieldElement:
    value: int
    modulus: Modulus

    def __post_init__(self) -> None:
        if not 0 <= self.value < self.modulus.p:
            raise ValueError(f"{self.value} is not a canonical residue mod {self.modulus.p}")

    @property
    def p(self) -> int:
        return self.modulus.p

    def _other(self, other: FieldElement | int) -> int:
        if isinstance(other, FieldElement):
            if other.modulus.p != self.modulus.p:
                raise ModulusMismatch(f"mod {self.modulus.p} vs mod {other.modulus.p}")
            return other.value
        if isinstance(other, int):
            return other % self.modulus.p
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other: FieldElement | int) -> FieldElement:
        return FieldElement((self.value + self._other(other)) % self.p, self.modulus)

    __radd__ = __add__

    def __sub__(self, other: FieldElement | int) -> FieldElement:
        return FieldElement((self.value - self._other(other)) % self.p, self.modulus)

    def __rsub__(self, other: int) -> FieldElement:
        return FieldElement((self._other(other) - self.value) % self.p, self.modulus)

    def __mul__(self, other: FieldElement | int) -> FieldElement:
        return FieldElement(self.value * self._other(other) % self.p, self.modulus)

    __rmul__ = __mul__

    def __neg__(self) -> FieldElement:
        return FieldElement(-self.value % self.p, self.modulus)

    def __truediv__(self, other: FieldElement | int) -> FieldElement:
        return self * mod_inv(FieldElement(self._other(other), self.modulus))

    def __pow__(self, exponent: int) -> FieldElement:
        if exponent < 0:
            return mod_inv(self) ** -exponent
        return FieldElement(pow(self.value, exponent, self.p), self.modulus)

    def __int__(self) -> int:
        return self.value

    def __index__(self) -> int:
        return self.value

    def __str__(self) -> str:
        return str(self.value)

    def __repr__(self) -> str:
        return f"FieldElement({self.value} mod {self.p})"


def mod_arith(a: FieldElement, b: FieldElement, kind: Literal["add", "sub", "mul"]) -> FieldElement:
    if a.modulus.p != b.modulus.p:
        raise ModulusMismatch(f"mod {a.p} vs mod {b.p}")
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    raise ValueError(f"unknown operation {kind!r}")


def inv_mod(value: int, p: int) -> int:
    """Inverse of ``value`` modulo prime ``p`` on raw integers."""
    value %= p
    if value == 0:
        raise ZeroInverse(f"0 has no inverse mod {p}")
    return pow(value, -1, p)


def mod_inv(a: FieldElement) -> FieldElement:
    return FieldElement(inv_mod(a.value, a.p), a.modulus)
