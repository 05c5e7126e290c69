import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from socialss.errors import CompositeModulus, ModulusMismatch, TooSmall, ZeroInverse
from socialss.field import FieldElement, Modulus, is_prime, mod_arith, mod_inv, validate_modulus

from .oracles import brute_inverse, fermat_inverse, is_prime_trial

M11 = Modulus(11)
M61 = Modulus(2**61 - 1)
# largest 64-bit prime
P64 = 2**64 - 59


def test_validate_small_prime():
    assert validate_modulus(11).p == 11


def test_validate_rejects_composite():
    with pytest.raises(CompositeModulus):
        validate_modulus(15)


def test_validate_rejects_too_small():
    with pytest.raises(TooSmall):
        validate_modulus(2)


def test_mersenne_61_is_prime():
    assert validate_modulus(2305843009213693951).p == 2**61 - 1


def test_rejects_beyond_64_bits():
    with pytest.raises(TooSmall):
        Modulus(2**89 - 1)


def test_is_prime_matches_trial_division():
    assert [n for n in range(2000) if is_prime(n)] == [n for n in range(2000) if is_prime_trial(n)]


@pytest.mark.parametrize(
    "n, expected",
    [
        (P64, True),
        (2**64 - 1, False),
        (3215031751, False),  # strong pseudoprime to bases 2, 3, 5, 7
        (3825123056546413051, False),  # strong pseudoprime to the first nine prime bases
        (2**31 - 1, True),
        (1000000007 * 998244353, False),
    ],
)
def test_is_prime_hard_cases(n, expected):
    sympy = pytest.importorskip("sympy")
    assert bool(sympy.isprime(n)) == expected
    assert is_prime(n) == expected


def test_mul_7_8_mod_11():
    assert mod_arith(M11(7), M11(8), "mul") == M11(1)


def test_sub_wraps_to_canonical():
    assert mod_arith(M11(0), M11(1), "sub").value == 10


def test_add_zero_identity_exhaustive():
    assert all(mod_arith(M11(x), M11(0), "add") == M11(x) for x in range(11))


def test_modulus_mismatch():
    with pytest.raises(ModulusMismatch):
        mod_arith(M11(1), Modulus(13)(1), "add")
    with pytest.raises(ModulusMismatch):
        M11(1) * Modulus(13)(1)


def test_inverse_examples():
    assert mod_inv(M11(2)).value == 6 == brute_inverse(2, 11)
    assert mod_inv(Modulus(97)(1)).value == 1
    m31 = Modulus(31)
    assert mod_inv(m31(24)).value == brute_inverse(24, 31) == 22


def test_zero_has_no_inverse():
    with pytest.raises(ZeroInverse):
        mod_inv(M11(0))


def test_field_axioms_exhaustive_p11():
    els = [M11(v) for v in range(11)]
    for a, b in itertools.product(els, repeat=2):
        assert a + b == b + a and a * b == b * a
        assert (a - b) + b == a
    for a, b, c in itertools.product(els, repeat=3):
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
    for a in els[1:]:
        assert a * mod_inv(a) == M11(1)


@given(st.integers(0, 2**61 - 2), st.integers(0, 2**61 - 2), st.integers(0, 2**61 - 2))
def test_field_axioms_large_prime(a, b, c):
    a, b, c = M61(a), M61(b), M61(c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a * b).value == a.value * b.value % M61.p


@given(st.integers(1, P64 - 1), st.integers(0, P64 - 1))
def test_mul_and_inverse_at_64_bits(a, b):
    m = Modulus(P64)
    x, y = m(a), m(b)
    r = mod_arith(x, y, "mul")
    assert 0 <= r.value < P64
    assert r.value == a * b % P64
    assert (x * mod_inv(x)).value == 1
    assert mod_inv(x).value == fermat_inverse(a, P64)


def test_canonical_representative_enforced():
    with pytest.raises(ValueError):
        FieldElement(11, M11)
    assert M11(-1).value == 10


def test_random_inverses_p10007():
    rng = random.Random(5)
    m = Modulus(10007)
    for _ in range(200):
        a = rng.randrange(1, 10007)
        assert mod_inv(m(a)).value == fermat_inverse(a, 10007)
