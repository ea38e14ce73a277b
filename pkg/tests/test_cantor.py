import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hairy_cantor.cantor import (
    CantorApprox,
    ChildSelector,
    Interval,
    Layout,
    Scheme,
    address_index,
    address_to_interval,
    build_cantor,
    children,
    frac_to_str,
    index_address,
    is_endpoint,
    layout_levels,
    parse_frac,
)
from hairy_cantor.errors import AddressError, ContractError, DomainError, ResourceError


def test_level_counts_canonical():
    assert [len(build_cantor(Scheme.CANONICAL, d).atoms) for d in range(6)] == [1, 1, 3, 15, 105, 945]
    assert Scheme.CANONICAL.level_count(6) == 10395
    assert Scheme.CANONICAL.level_count(7) == 135135


def test_level_counts_middle_third():
    c = build_cantor(Scheme.MIDDLE_THIRD, 5)
    assert [len(level) for level in c.levels] == [2**k for k in range(6)]


def test_canonical_level_two():
    c = build_cantor(Scheme.CANONICAL, 2)
    assert c.levels[1] == (Interval(0, 1),)
    assert c.levels[2] == (
        Interval(0, Fraction(1, 5)),
        Interval(Fraction(2, 5), Fraction(3, 5)),
        Interval(Fraction(4, 5), 1),
    )


def test_middle_third_level_two():
    c = build_cantor(Scheme.MIDDLE_THIRD, 2)
    assert [(iv.lo, iv.hi) for iv in c.levels[2]] == [
        (0, Fraction(1, 9)),
        (Fraction(2, 9), Fraction(1, 3)),
        (Fraction(2, 3), Fraction(7, 9)),
        (Fraction(8, 9), 1),
    ]


@pytest.mark.parametrize("scheme,depth", [(Scheme.CANONICAL, 4), (Scheme.MIDDLE_THIRD, 6)])
def test_atoms_sorted_and_disjoint(scheme, depth):
    atoms = build_cantor(scheme, depth).atoms
    assert all(a.hi < b.lo for a, b in zip(atoms, atoms[1:]))


def test_canonical_atom_lengths_are_products():
    c = build_cantor(Scheme.CANONICAL, 4)
    expected = Fraction(1) / (5 * 9 * 13)
    assert all(a.length == expected for a in c.atoms)


def test_interval_cap():
    with pytest.raises(ResourceError):
        build_cantor(Scheme.CANONICAL, 8)
    with pytest.raises(ResourceError):
        build_cantor(Scheme.MIDDLE_THIRD, 10, cap=1000)


def test_negative_depth():
    with pytest.raises(DomainError):
        build_cantor(Scheme.CANONICAL, -1)


def test_address_round_trip_small():
    for k in range(5):
        for i in range(Scheme.CANONICAL.level_count(k)):
            assert address_index(Scheme.CANONICAL, index_address(Scheme.CANONICAL, k, i)) == i


def test_address_to_interval():
    c = build_cantor(Scheme.CANONICAL, 4)
    assert address_to_interval(c, (1, 2)) == Interval(Fraction(2, 5), Fraction(3, 5))
    assert address_to_interval(c, (1, 2, 3, 4)).contains(Interval(Fraction(1, 2), Fraction(1, 2)))


@pytest.mark.parametrize("bad", [(2,), (1, 4), (1, 0), (1, 1, 6), (1, "a")])
def test_bad_addresses(bad):
    with pytest.raises(AddressError):
        address_index(Scheme.CANONICAL, bad)


def test_address_longer_than_depth():
    with pytest.raises(AddressError):
        address_to_interval(build_cantor(Scheme.CANONICAL, 2), (1, 1, 1))


def test_children_brute_force():
    """Children ranges agree with containment, checked pair by pair."""
    for scheme, depth in ((Scheme.CANONICAL, 4), (Scheme.MIDDLE_THIRD, 5)):
        c = build_cantor(scheme, depth)
        for q in range(depth):
            for p in range(q + 1, depth + 1):
                for j, parent in enumerate(c.levels[q], start=1):
                    inside = [i for i, iv in enumerate(c.levels[p], start=1) if parent.contains(iv)]
                    assert list(children(c, ChildSelector(p, q, j))) == inside


def test_children_middle_third_formula():
    c = build_cantor(Scheme.MIDDLE_THIRD, 6)
    p, q, j = 6, 2, 3
    assert children(c, ChildSelector(p, q, j)) == range(2 ** (p - q) * (j - 1) + 1, 2 ** (p - q) * j + 1)


def test_children_domain_errors():
    c = build_cantor(Scheme.CANONICAL, 3)
    with pytest.raises(DomainError):
        children(c, ChildSelector(2, 2, 1))
    with pytest.raises(DomainError):
        children(c, ChildSelector(4, 1, 1))
    with pytest.raises(DomainError):
        children(c, ChildSelector(3, 2, 4))


def test_endpoints():
    c = build_cantor(Scheme.MIDDLE_THIRD, 3)
    assert is_endpoint(c, 0) and is_endpoint(c, Fraction(1, 27)) and is_endpoint(c, 1)
    with pytest.raises(DomainError):
        is_endpoint(c, Fraction(1, 2))  # in a gap
    with pytest.raises(DomainError):
        is_endpoint(c, Fraction(1, 54))  # inside an atom


def test_locate():
    c = build_cantor(Scheme.CANONICAL, 3)
    assert c.locate(0) == 0
    assert c.locate(1) == len(c.atoms) - 1
    assert c.locate(Fraction(3, 10)) is None


def test_json_round_trip():
    c = build_cantor(Scheme.CANONICAL, 3)
    obj = json.loads(json.dumps(c.to_json()))
    assert obj["scheme"] == "canonical"
    assert obj["levels"][2][1] == {"lo": "2/5", "hi": "3/5"}
    assert CantorApprox.from_json(obj) == c


def test_json_rejects_tampered_levels():
    obj = build_cantor(Scheme.CANONICAL, 2).to_json()
    obj["levels"][2][0]["hi"] = "1/4"
    with pytest.raises(ContractError):
        CantorApprox.from_json(obj)


def test_address_uniform_layout():
    c = build_cantor(Scheme.CANONICAL, 4)
    levels = layout_levels(c, Layout.ADDRESS_UNIFORM)
    finest = levels[4]
    assert finest[0] == Interval(0, Fraction(1, 280))
    assert finest[0].midpoint == Fraction(1, 560)
    assert finest[1].midpoint - finest[0].midpoint == Fraction(3, 2 * 280)
    assert layout_levels(c, Layout.TRUE_CANTOR) is c.levels


@given(st.fractions())
def test_frac_round_trip(q):
    assert parse_frac(frac_to_str(q)) == q


@given(st.integers(0, 4).flatmap(lambda k: st.tuples(st.just(k), st.integers(0, Scheme.CANONICAL.level_count(k) - 1))))
def test_index_address_inverse(case):
    k, i = case
    a = index_address(Scheme.CANONICAL, k, i)
    assert len(a) == k
    assert address_index(Scheme.CANONICAL, a) == i


@given(st.fractions(0, 1))
def test_locate_matches_scan(x):
    c = build_cantor(Scheme.MIDDLE_THIRD, 5)
    hits = [i for i, a in enumerate(c.atoms) if x in a]
    found = c.locate(x)
    assert (found is None and not hits) or found == hits[0]
