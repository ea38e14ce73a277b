from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from hairy_cantor.bump import (
    BumpFunction,
    envelope,
    make_bump,
    partition_bump,
    verify_bump,
)
from hairy_cantor.cantor import Interval, Scheme, build_cantor
from hairy_cantor.errors import ContractError, DomainError
from hairy_cantor.hair import LengthModel, canonical_model

F = Fraction


def test_whole_interval_depth4(canon4):
    b = make_bump(canon4, Interval(0, 1))
    assert b.top == 1
    assert b.maximizer.contains(Interval(F(1, 2), F(1, 2)))
    assert list(b.values[:4]) == [F(1, 24), F(1, 12), F(1, 8), F(1, 6)]
    # mirrored descent
    assert list(b.values) == list(reversed(b.values))
    assert verify_bump(b).passed


def test_jump_shrinks_with_depth(canon4, canon6):
    r4 = verify_bump(make_bump(canon4, Interval(0, 1)))
    r6 = verify_bump(make_bump(canon6, Interval(0, 1)))
    assert r4.max_jump == F(1, 4) and r6.max_jump == F(1, 6)
    assert r6.max_jump < r4.max_jump


def test_single_atom_bump(canon4):
    atom = canon4.cantor.atoms[10]
    b = make_bump(canon4, atom)
    assert b.values == (canon4.values[10],)
    assert b(atom.lo) == b(atom.hi) == canon4.values[10]


def test_first_fifth(canon4):
    b = make_bump(canon4, Interval(0, F(1, 5)))
    assert b.top == F(1, 2)
    assert b.interval.lo == 0 and b.interval.hi == F(1, 5)
    assert 0 < b.peak < len(b.atoms) - 1


def test_dominance_and_anchors(canon6):
    b = make_bump(canon6, Interval(F(2, 5), F(3, 5)))
    assert all(v >= r for v, r in zip(b.values, b.raw))
    assert b.values[b.peak] == b.raw[b.peak]
    assert b.values[0] == b.raw[0] and b.values[-1] == b.raw[-1]


def test_idempotent(canon6):
    b = make_bump(canon6, Interval(0, 1))
    assert envelope(b.values, b.peak) == list(b.values)


def test_maximizer_must_be_a_max(canon4):
    with pytest.raises(ContractError):
        make_bump(canon4, Interval(0, 1), maximizer=0)
    with pytest.raises(ContractError):
        make_bump(canon4, Interval(0, F(1, 5)), maximizer=104)


def test_maximizer_as_interval(canon4):
    b0 = make_bump(canon4, Interval(0, 1))
    b1 = make_bump(canon4, Interval(0, 1), maximizer=b0.maximizer)
    assert b0 == b1


def test_empty_interval(canon4):
    with pytest.raises(DomainError):
        make_bump(canon4, Interval(F(1, 4), F(3, 10)))


def test_gap_values(canon4):
    """Across a gap the running max carries over from the side away from the peak."""
    b = make_bump(canon4, Interval(0, 1))
    left_gap = (canon4.cantor.atoms[6].hi + canon4.cantor.atoms[7].lo) / 2
    assert b(left_gap) == b.values[6]
    right_gap = 1 - left_gap
    assert b(right_gap) == b.values[-7]
    with pytest.raises(DomainError):
        b(F(2))


def test_hand_built_dip_fails():
    atoms = build_cantor(Scheme.MIDDLE_THIRD, 2).atoms
    values = (F(1, 4), F(1, 8), F(1, 2), F(1, 3))
    b = BumpFunction(Interval(0, 1), atoms, values, values, 2)
    r = verify_bump(b)
    assert not r.monotone and r.inversion == 0
    assert not r.passed


def test_partition_bump(canon4):
    parts = [Interval(0, F(1, 5)), Interval(F(2, 5), F(3, 5)), Interval(F(4, 5), 1)]
    pb = partition_bump(canon4, parts)
    assert pb(F(3, 10)) == 0
    assert pb(F(1, 2)) == 1
    for iv, b in zip(parts, pb.bumps):
        assert b == make_bump(canon4, iv)


def test_csv_rows(canon4):
    rows = make_bump(canon4, Interval(0, F(1, 5))).to_csv_rows()
    assert rows[0] == ("0/1", "1/24")


@settings(max_examples=60, deadline=None)
@given(st.lists(st.fractions(0, 3), min_size=16, max_size=16), st.data())
def test_random_bumps_verify(values, data):
    c = build_cantor(Scheme.MIDDLE_THIRD, 4)
    l = LengthModel(c, tuple(values))
    i = data.draw(st.integers(0, 15))
    j = data.draw(st.integers(i, 15))
    b = make_bump(l, Interval(c.atoms[i].lo, c.atoms[j].hi))
    r = verify_bump(b)
    assert r.passed
    assert b.top == max(values[i : j + 1])
