from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from socialss.errors import LengthMismatch
from socialss.social import ActionVector, delta, social_factors, social_step, social_update
from socialss.trust import TrustParams, TrustState

from .strategies import trust_params

D = TrustParams()


@pytest.mark.parametrize("pattern, expected", [("CCCC", 4), ("DDDD", 0), ("CDCC", 3)])
def test_delta(pattern, expected):
    assert delta(ActionVector.from_string(pattern)) == expected


def test_action_vector_validation():
    with pytest.raises(ValueError):
        ActionVector.from_string("CXD")
    with pytest.raises(ValueError):
        ActionVector(())


@pytest.mark.parametrize(
    "d, reward, penalty",
    [(4, 0, 1), (3, 0.25, 0.75), (2, 0.5, 0.5), (1, 0.75, 0.25), (0, 1, 0)],
)
def test_table_of_factors_n4(d, reward, penalty):
    r, p = social_factors(d, 4)
    assert (r, p) == (Fraction(reward), Fraction(penalty))
    assert float(r) == reward and float(p) == penalty


def test_worked_example():
    out = social_step([0.0, 0.0, 0.0, 0.0], [True, True, False, True], D)
    # 0.75 * fl(0.05) is not the double nearest 0.0375, hence approx
    assert out == pytest.approx([0.0125, 0.0125, -0.0375, 0.0125], abs=1e-15)


@given(st.lists(st.floats(-1, 1), min_size=1, max_size=12), st.booleans(), trust_params)
def test_unanimous_periods_are_fixed_points(values, c, p):
    assert social_step(values, [c] * len(values), p) == values


def test_single_player_never_moves():
    for c in (True, False):
        assert social_step([0.3], [c], D) == [0.3]


@given(st.integers(1, 200), st.data())
def test_majority_conditions(n, data):
    d = data.draw(st.integers(0, n))
    r, p = social_factors(d, n)
    assert r + p == 1
    half = Fraction(1, 2)
    if 2 * d > n:
        assert r < half < p
    elif 2 * d < n:
        assert r > half > p
    else:
        assert r == p == half


def test_social_update_states():
    states = [TrustState(0.0, 2)] * 4
    out = social_update(states, ActionVector.from_string("CCDC"), D)
    assert [s.value for s in out] == pytest.approx([0.0125, 0.0125, -0.0375, 0.0125], abs=1e-15)
    assert {s.period for s in out} == {3}


def test_length_mismatch():
    with pytest.raises(LengthMismatch):
        social_update([TrustState()], ActionVector.from_string("CC"), D)


def test_factor_validation():
    with pytest.raises(ValueError):
        social_factors(5, 4)
    with pytest.raises(ValueError):
        social_factors(0, 0)
