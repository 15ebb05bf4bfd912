import json
from fractions import Fraction

import pytest

from tsrm_lab.errors import Malformed, NotACoinTime, OutsideInterval
from tsrm_lab.profiles import (
    AdmissibleInterval,
    ModifiedProfile,
    event_weight,
    flat_value,
    hit_time,
    interval,
    k_bounds,
    modify,
    position_probability,
)
from tsrm_lab.walk import ScriptedCoins, SequentialCoins, WalkState, step

# the two one-coin observations: a bump on [0,2] and its mirror on [-2,0]
F_RIGHT = ModifiedProfile(-1, (-1, 0, 1, 0, -1))
F_LEFT = ModifiedProfile(-3, (-1, 0, 1, 0, -1))
# support [0,4] with one internal zero at 2, the walker's piece is [3,4]
F_CUT_RIGHT = ModifiedProfile(-1, (-1, 0, 1, 0, 1, 0, -1))
F_CUT_LEFT = ModifiedProfile(-5, (-1, 0, 1, 0, 1, 0, -1))


def test_flat_value_pattern():
    assert [flat_value(y) for y in range(-3, 4)] == [-1, 0, -1, 0, -1, 0, -1]


def test_flat_profile():
    f = ModifiedProfile.flat()
    assert f.m_minus == 0 and f.m_plus == 0
    assert f.area == 0
    assert f.zeros == ()
    assert f.is_flat
    assert f.value(0) == 0
    assert f.value(7) == -1 and f.value(8) == 0  # flat continuation


def test_one_coin_profiles():
    assert (F_RIGHT.m_minus, F_RIGHT.m_plus) == (0, 2)
    assert (F_LEFT.m_minus, F_LEFT.m_plus) == (-2, 0)
    assert F_RIGHT.area == 2 and F_LEFT.area == 2
    assert F_RIGHT.zeros == () and F_LEFT.zeros == ()
    assert F_RIGHT.value(1) == 1
    assert F_RIGHT.value(-1) == -1


def test_internal_zero_detection():
    assert F_CUT_RIGHT.zeros == (2,)
    assert F_CUT_LEFT.zeros == (-2,)
    assert F_CUT_RIGHT.area == 4


def test_interval_closed_when_no_zeros():
    iv = interval(F_RIGHT)
    assert (iv.left, iv.right) == (0, 2)
    assert not iv.open_left and not iv.open_right
    assert str(iv) == "[0, 2]"
    assert list(iv) == [0, 1, 2]
    assert len(iv) == 3
    assert 0 in iv and 2 in iv and 3 not in iv


def test_interval_cut_by_positive_zero():
    iv = interval(F_CUT_RIGHT)
    assert (iv.left, iv.right) == (3, 4)
    assert iv.open_left and not iv.open_right
    assert str(iv) == "(2, 4]"
    assert 2 not in iv and 3 in iv


def test_interval_cut_by_negative_zero():
    iv = interval(F_CUT_LEFT)
    assert (iv.left, iv.right) == (-4, -3)
    assert iv.open_right and not iv.open_left
    assert str(iv) == "[-4, -2)"


@pytest.mark.parametrize("lo,values", [
    (-1, (-1, -1)),                      # too short
    (0, (-1, 0, -1)),                    # sentinel parity off
    (-1, (0, 0, -1)),                    # left sentinel missing
    (-1, (-1, 0, 0)),                    # right sentinel missing
    (-1, (-1, 1, -1)),                   # value parity off
    (-1, (-1, 0, 2, 0, -1)),             # slope jump
    (-1, (-1, 0, -1, 0, -1)),            # interior -1
    (1, (-1, 0, 1, 0, -1)),              # origin outside the support
    (-3, (-1, 0, 1, 0, 1, 0, -1)),       # internal zero at the origin
    (-5, (-1, 0, 1, 0, 1, 2, 1, 0, 1, 0, -1)),  # zeros on both sides
])
def test_malformed_profiles_rejected(lo, values):
    with pytest.raises(Malformed):
        ModifiedProfile(lo, values)


def test_modify_requires_a_coin_time():
    state = WalkState()
    coins = ScriptedCoins([True])
    step(state, coins)  # one step in, the two local edges now differ
    with pytest.raises(NotACoinTime):
        modify(state.profile, state.x)


def test_modify_first_coin_gives_the_bump():
    state = WalkState()
    coins = ScriptedCoins([True])
    step(state, coins)
    step(state, coins)
    assert state.is_coin_time
    f = modify(state.profile, state.x)
    assert f == F_RIGHT


def test_modify_satisfies_the_counting_identities():
    state = WalkState()
    coins = SequentialCoins(909)
    for _ in range(400):
        step(state, coins)
    while not state.is_coin_time:
        step(state, coins)
    f = modify(state.profile, state.x)
    n, k = hit_time(f, state.x)
    assert n == state.n
    assert k == state.coins_used
    assert f.area % 2 == 0
    assert state.x in interval(f)
    lo_k, hi_k = k_bounds(f)
    assert lo_k <= k <= hi_k


def test_hit_time_frozen_and_bounds():
    assert hit_time(F_RIGHT, 2) == (2, 1)
    assert hit_time(F_RIGHT, 1) == (3, 2)
    assert hit_time(F_RIGHT, 0) == (2, 1)
    assert k_bounds(F_RIGHT) == (1, 3)
    with pytest.raises(OutsideInterval):
        hit_time(F_RIGHT, 3)
    with pytest.raises(OutsideInterval):
        hit_time(F_CUT_RIGHT, 2)


def test_event_weight_frozen():
    assert event_weight(F_RIGHT) == Fraction(1, 4)
    assert event_weight(F_CUT_RIGHT) == Fraction(1, 8)
    assert event_weight(ModifiedProfile.flat()) == Fraction(1)


def test_position_probability_frozen():
    flat = ModifiedProfile.flat()
    assert position_probability(flat, 0) == 1
    assert position_probability(flat, 1) == 0
    # interior site carries the bare weight
    assert position_probability(F_RIGHT, 1) == Fraction(1, 4)
    # vanished endpoint away from the origin carries twice the weight
    assert position_probability(F_RIGHT, 2) == Fraction(1, 2)
    # the walker cannot sit at the origin over a vanished column
    assert position_probability(F_RIGHT, 0) == 0
    assert position_probability(F_RIGHT, 5) == 0
    assert position_probability(F_CUT_RIGHT, 2) == 0


def test_weight_probability_sandwich_on_the_interval():
    for f in (F_RIGHT, F_LEFT, F_CUT_RIGHT, F_CUT_LEFT):
        w = event_weight(f)
        for x in interval(f):
            p = position_probability(f, x)
            if f.value(x) >= 1:
                assert p == w
            else:
                assert p == (0 if x == 0 else 2 * w)


def test_serialize_round_trip():
    blob = F_CUT_RIGHT.serialize()
    back = ModifiedProfile.deserialize(blob)
    assert back == F_CUT_RIGHT
    assert json.loads(json.dumps(blob)) == blob


def test_rows_and_csv(tmp_path):
    rows = F_RIGHT.to_rows()
    assert rows[0] == (-1, -1) and rows[-1] == (3, -1)
    out = tmp_path / "profile.csv"
    F_RIGHT.to_csv(out)
    lines = out.read_text().splitlines()
    assert lines[0] == "x,f(x)"
    assert len(lines) == 1 + len(rows)


def test_admissible_interval_is_value_like():
    a = AdmissibleInterval(0, 2)
    b = AdmissibleInterval(0, 2)
    assert a == b
    assert len(AdmissibleInterval(5, 5)) == 1
