from fractions import Fraction

import pytest

from hairy_cantor.cantor import Scheme, build_cantor
from hairy_cantor.errors import ContractError, MatchingError
from hairy_cantor.hair import LengthModel, canonical_model
from hairy_cantor.matching import (
    EndpointMap,
    base_psi,
    build_matched_nests,
    free_split,
    window,
)
from hairy_cantor.models import perturbed_model

F = Fraction


def recomputed_ratios(pair, lX, lY):
    """Every ratio rebuilt from raw atom values, ignoring stored maxima."""
    out = []
    for n in range(1, pair.levels + 1):
        row = []
        for i, j in enumerate(pair.parents[n]):
            def mx(values, blocks, k):
                a, b = blocks[k]
                return max(values[a : b + 1])

            num = mx(lY.values, pair.y_blocks[n], i) / mx(lY.values, pair.y_blocks[n - 1], j)
            den = mx(lX.values, pair.x_blocks[n], i) / mx(lX.values, pair.x_blocks[n - 1], j)
            row.append(num / den)
        out.append(row)
    return out


def test_window():
    assert window(1) == F(1, 4)
    assert window(6) == F(1, 128)


def test_identical_inputs(identical_pair):
    p = identical_pair
    assert p.x_blocks == p.y_blocks
    assert all(r == 1 for level in p.ratios[1:] for r in level)
    assert p.violations() == []


def test_scaled_input_gives_unit_ratios(canon6):
    p = build_matched_nests(canon6, canon6.scaled(F(3, 7)), 4)
    assert all(r == 1 for level in p.ratios[1:] for r in level)


def test_perturbed_pair_ratios(perturbed_pair, canon6, perturbed6):
    p = perturbed_pair
    assert p.levels == 6
    assert p.violations() == []
    rebuilt = recomputed_ratios(p, canon6, perturbed6)
    assert rebuilt == [list(r) for r in p.ratios[1:]]
    for n, level in enumerate(rebuilt, start=1):
        eps = F(1, 2 ** (n + 1))
        assert all(1 - eps < r < 1 + eps for r in level)


def test_perturbed_pair_structure(perturbed_pair):
    p = perturbed_pair
    size = p.cantor.diameter
    for n in range(1, p.levels + 1):
        xs, ys = p.intervals("X", n), p.intervals("Y", n)
        assert len(xs) == len(ys)
        px, py = p.intervals("X", n - 1), p.intervals("Y", n - 1)
        for i, j in enumerate(p.parents[n]):
            assert px[j].contains(xs[i]) and py[j].contains(ys[i])
        assert all(iv.length < size / 2**n for iv in xs + ys)
        # every atom lies in exactly one block at every level
        for blocks in (p.x_blocks[n], p.y_blocks[n]):
            covered = [t for a, b in blocks for t in range(a, b + 1)]
            assert covered == list(range(len(p.cantor.atoms)))
    assert p.free_side[1:] == ["Y", "X", "Y", "X", "Y", "X"]


def test_stored_maxima_are_exact(perturbed_pair, canon6, perturbed6):
    p = perturbed_pair
    for n in range(p.levels + 1):
        for (a, b), m in zip(p.x_blocks[n], p.x_max[n]):
            assert m == max(canon6.values[a : b + 1])
        for (a, b), m in zip(p.y_blocks[n], p.y_max[n]):
            assert m == max(perturbed6.values[a : b + 1])


def test_psi_pairs_level_two_endpoints(perturbed_pair):
    p = perturbed_pair
    ends_x = sorted(e for iv in p.intervals("X", 2) for e in (iv.lo, iv.hi))
    ends_y = sorted(e for iv in p.intervals("Y", 2) for e in (iv.lo, iv.hi))
    psi = base_psi(p)
    assert psi.order_preserving
    assert sorted(psi(x) for x in ends_x) == ends_y
    assert len(set(ends_x)) == len(ends_x)


def test_psi_identity_on_identical(identical_pair):
    psi = base_psi(identical_pair)
    assert all(x == y for x, y in psi.pairs)
    assert psi(F(7, 13)) == F(7, 13)


def test_endpoint_map_extension():
    m = EndpointMap([(F(0), F(1)), (F(1), F(3))])
    assert m(F(1, 2)) == 2
    assert m(-1) == 0
    assert m(2) == 4


def test_free_split_is_short():
    c = build_cantor(Scheme.CANONICAL, 4)
    blocks = free_split(c.atoms, 0, len(c.atoms) - 1, F(1, 4), 1)
    assert all(c.atoms[b].hi - c.atoms[a].lo < F(1, 4) for a, b in blocks)
    assert [t for a, b in blocks for t in range(a, b + 1)] == list(range(len(c.atoms)))


def test_free_split_atom_too_wide():
    c = build_cantor(Scheme.CANONICAL, 2)
    with pytest.raises(MatchingError):
        free_split(c.atoms, 0, 2, F(1, 10), 3)


def test_fine_perturbation_needs_more_depth(canon6):
    """Factors that change on every level-3 interval cannot be matched to
    level 6 at depth 6; the failure names the level."""
    with pytest.raises(MatchingError) as info:
        build_matched_nests(canon6, perturbed_model(canon6, seed=0, level=3), 6)
    assert info.value.level == 3
    assert "level 3" in str(info.value)


def test_contract_errors(canon6):
    with pytest.raises(ContractError):
        build_matched_nests(canon6, canonical_model(5), 2)
    zero = canon6.with_values([F(0)] * len(canon6.values))
    with pytest.raises(ContractError):
        build_matched_nests(canon6, zero, 2)


def test_json_has_exact_ratios(identical_pair):
    obj = identical_pair.to_json()
    assert obj["levels"] == 3
    assert set(r for row in obj["ratios"][1:] for r in row) == {"1/1"}
    assert obj["x"] == obj["y"]
