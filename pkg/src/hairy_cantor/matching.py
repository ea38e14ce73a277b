"""Matched partition nests for two length models on one Cantor set.

Both nests refine level by level with identical parent/child patterns.  At
each step one side (Y on even steps, X on odd ones) is cut freely into short
blocks at gaps; the other side is then cut so that every child's share of its
parent's maximum agrees with the free side to within ``2^-(n+2)``.  Blocks
are contiguous runs of atoms, so every partition boundary is an atom
endpoint.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .cantor import CantorApprox, Interval, frac_to_str
from .errors import ContractError, MatchingError
from .hair import LengthModel, argmax_leftmost

MAX_REFINEMENTS = 8


def window(level: int) -> Fraction:
    """Half-width of the ratio window for a level-``level`` child."""
    return Fraction(1, 2 ** (level + 1))


@dataclass
class MatchedNestPair:
    cantor: CantorApprox
    x_blocks: list  # x_blocks[n] = [(first_atom, last_atom), ...]
    y_blocks: list
    parents: list  # parents[n][i] = parent index of child i (parents[0] is empty)
    x_max: list  # x_max[n][i] = Max(l^X, J^X_{n,i})
    y_max: list
    ratios: list  # ratios[n][i], n >= 1
    free_side: list = field(default_factory=list)  # free_side[n] for n >= 1

    @property
    def levels(self) -> int:
        return len(self.x_blocks) - 1

    def intervals(self, side: str, n: int) -> list:
        blocks = self.x_blocks if side == "X" else self.y_blocks
        atoms = self.cantor.atoms
        return [Interval(atoms[a].lo, atoms[b].hi) for a, b in blocks[n]]

    def violations(self) -> list:
        """Every broken nest invariant, as human-readable strings."""
        out = []
        size = self.cantor.diameter
        for n in range(self.levels + 1):
            xs, ys = self.intervals("X", n), self.intervals("Y", n)
            if len(xs) != len(ys):
                out.append(f"level {n}: {len(xs)} X blocks vs {len(ys)} Y blocks")
                continue
            for side, ivs in (("X", xs), ("Y", ys)):
                if any(a.hi >= b.lo for a, b in zip(ivs, ivs[1:])):
                    out.append(f"level {n}: {side} blocks overlap or are unsorted")
                if n and any(iv.length >= size / 2**n for iv in ivs):
                    out.append(f"level {n}: {side} block of diameter >= 2^-{n}|C|")
            if n == 0:
                continue
            px, py = self.intervals("X", n - 1), self.intervals("Y", n - 1)
            for i, j in enumerate(self.parents[n]):
                if not (px[j].contains(xs[i]) and py[j].contains(ys[i])):
                    out.append(f"level {n}: child {i + 1} not inside parent {j + 1}")
                r = self.ratios[n][i]
                if not 1 - window(n) < r < 1 + window(n):
                    out.append(f"level {n}: ratio {r} of child {i + 1} outside window")
        return out

    def to_json(self) -> dict:
        def fracs(rows):
            return [[frac_to_str(v) for v in row] for row in rows]

        return {
            "levels": self.levels,
            "x": [[iv.to_json() for iv in self.intervals("X", n)] for n in range(self.levels + 1)],
            "y": [[iv.to_json() for iv in self.intervals("Y", n)] for n in range(self.levels + 1)],
            "x_atoms": [[list(b) for b in lvl] for lvl in self.x_blocks],
            "y_atoms": [[list(b) for b in lvl] for lvl in self.y_blocks],
            "parents": [list(p) for p in self.parents],
            "max_x": fracs(self.x_max),
            "max_y": fracs(self.y_max),
            "ratios": fracs(self.ratios),
            "free_side": list(self.free_side),
        }


def free_split(atoms: Sequence[Interval], a: int, b: int, bound: Fraction, level: int) -> list:
    """Fewest contiguous runs of atoms ``a..b`` whose hulls are shorter than
    ``bound`` (greedy from the left is optimal)."""
    blocks = []
    start = a
    for e in range(a, b + 1):
        if atoms[e].hi - atoms[start].lo >= bound:
            if e == start or atoms[e].hi - atoms[e].lo >= bound:
                raise MatchingError(
                    f"level {level}: atom {atoms[e]} is already wider than {bound}",
                    level=level,
                )
            blocks.append((start, e - 1))
            start = e
    blocks.append((start, b))
    return blocks


def _in_window(target: Fraction, run: Fraction, parent: Fraction, fit_is_x: bool, eps) -> bool:
    share = run / parent
    if share == 0:
        return False
    r = target / share if fit_is_x else share / target
    return 1 - eps < r < 1 + eps


def fit_children(
    values: Sequence[Fraction],
    atoms: Sequence[Interval],
    a: int,
    b: int,
    targets: Sequence[Fraction],
    hints: Sequence[tuple],
    middle: int,
    fit_is_x: bool,
    level: int,
    bound: Fraction,
) -> list:
    """Cut atoms ``a..b`` into ``len(targets)`` runs whose maxima, relative to
    the parent maximum, hit ``targets`` within the level's window.

    The child ``middle`` holds the parent's leftmost maximizer.  Cuts left of
    it are placed scanning right from ``a``, cuts right of it scanning left
    from ``b``.  Among the gaps that land in the window, the one nearest the
    free side's matching cut (``hints``) wins, ties going to the left.
    """
    eps = window(level)
    m = argmax_leftmost(values, a, b)
    top = values[m]
    count = len(targets)
    runs = [None] * count

    def fail(target, why):
        raise MatchingError(
            f"level {level}: cannot realise target ratio {target} ({why})",
            level=level,
            target=target,
        )

    def pick(candidates, hint):
        return min(candidates, key=lambda e: (abs(e - hint), e))

    start = a
    for i in range(middle):
        if targets[i] == 0:
            fail(targets[i], "zero maximum on the free side")
        run_max, candidates = None, []
        for e in range(start, m - (middle - i) + 1):
            if atoms[e].hi - atoms[start].lo >= bound:
                break
            run_max = values[e] if run_max is None else max(run_max, values[e])
            if _in_window(targets[i], run_max, top, fit_is_x, eps):
                candidates.append(e)
        if not candidates:
            fail(targets[i], "no gap left of the maximizer lands in the window")
        chosen = pick(candidates, hints[i][1])
        runs[i] = (start, chosen)
        start = chosen + 1

    end = b
    for i in range(count - 1, middle, -1):
        if targets[i] == 0:
            fail(targets[i], "zero maximum on the free side")
        run_max, candidates = None, []
        for s in range(end, m + (i - middle) - 1, -1):
            if atoms[end].hi - atoms[s].lo >= bound:
                break
            run_max = values[s] if run_max is None else max(run_max, values[s])
            if _in_window(targets[i], run_max, top, fit_is_x, eps):
                candidates.append(s)
        if not candidates:
            fail(targets[i], "no gap right of the maximizer lands in the window")
        chosen = pick(candidates, hints[i][0])
        runs[i] = (chosen, end)
        end = chosen - 1

    if atoms[end].hi - atoms[start].lo >= bound:
        fail(Fraction(1), "block around the maximizer is too wide")
    runs[middle] = (start, end)
    return runs


def _refine(free: LengthModel, fit: LengthModel, free_parents, fit_parents, level, free_bound, fit_bound, fit_is_x):
    atoms = free.cantor.atoms
    free_blocks, fit_blocks, parents = [], [], []
    for j, ((fa, fb), (ga, gb)) in enumerate(zip(free_parents, fit_parents)):
        kids = free_split(atoms, fa, fb, free_bound, level)
        parent_top = max(free.values[fa : fb + 1])
        peak = argmax_leftmost(free.values, fa, fb)
        middle = next(i for i, (s, e) in enumerate(kids) if s <= peak <= e)
        targets = [max(free.values[s : e + 1]) / parent_top for s, e in kids]
        fitted = fit_children(
            fit.values, atoms, ga, gb, targets, kids, middle, fit_is_x, level, fit_bound
        )
        free_blocks.extend(kids)
        fit_blocks.extend(fitted)
        parents.extend([j] * len(kids))
    return free_blocks, fit_blocks, parents


def _block_maxima(values, blocks) -> list:
    return [max(values[a : b + 1]) for a, b in blocks]


def build_matched_nests(lX: LengthModel, lY: LengthModel, levels: int) -> MatchedNestPair:
    """Matched nests of ``levels`` refinements for two models on one Cantor set.

    If a step fails (a window cannot be hit, or a fitted block comes out too
    wide) the free side is re-cut with half the block length, up to
    ``MAX_REFINEMENTS`` times, before the first failure is raised.
    """
    if lX.cantor is not lY.cantor and lX.cantor != lY.cantor:
        raise ContractError("both models must live on the same Cantor approximation")
    if lX.interval_max[0][0] <= 0 or lY.interval_max[0][0] <= 0:
        raise ContractError("both models need a positive maximum")
    c = lX.cantor
    size = c.diameter
    whole = [(0, len(c.atoms) - 1)]
    pair = MatchedNestPair(
        c,
        [whole],
        [whole],
        [()],
        [[lX.interval_max[0][0]]],
        [[lY.interval_max[0][0]]],
        [()],
        [None],
    )
    for n in range(levels):
        free_is_y = n % 2 == 0
        free, fit = (lY, lX) if free_is_y else (lX, lY)
        free_parents = pair.y_blocks[n] if free_is_y else pair.x_blocks[n]
        fit_parents = pair.x_blocks[n] if free_is_y else pair.y_blocks[n]
        first_error = None
        for refine in range(MAX_REFINEMENTS + 1):
            try:
                free_blocks, fit_blocks, parents = _refine(
                    free,
                    fit,
                    free_parents,
                    fit_parents,
                    n + 1,
                    size / 2 ** (n + 2 + refine),
                    size / 2 ** (n + 1),
                    fit_is_x=free_is_y,
                )
                break
            except MatchingError as err:
                first_error = first_error or err
        else:
            raise first_error
        x_blocks, y_blocks = (fit_blocks, free_blocks) if free_is_y else (free_blocks, fit_blocks)
        x_max = _block_maxima(lX.values, x_blocks)
        y_max = _block_maxima(lY.values, y_blocks)
        ratios = [
            (y_max[i] / pair.y_max[n][j]) / (x_max[i] / pair.x_max[n][j])
            for i, j in enumerate(parents)
        ]
        pair.x_blocks.append(x_blocks)
        pair.y_blocks.append(y_blocks)
        pair.parents.append(tuple(parents))
        pair.x_max.append(x_max)
        pair.y_max.append(y_max)
        pair.ratios.append(ratios)
        pair.free_side.append("Y" if free_is_y else "X")
    bad = pair.violations()
    if bad:
        raise MatchingError("; ".join(bad[:5]), level=levels)
    return pair


class EndpointMap:
    """Order-preserving correspondence between the two nests' block endpoints,
    extended piecewise linearly (and by translation outside the hull)."""

    def __init__(self, pairs: Sequence[tuple]):
        self.pairs = sorted(pairs)
        self._xs = [x for x, _ in self.pairs]

    @property
    def order_preserving(self) -> bool:
        ys = [y for _, y in self.pairs]
        return all(a < b for a, b in zip(self._xs, self._xs[1:])) and all(
            a < b for a, b in zip(ys, ys[1:])
        )

    def __call__(self, x) -> Fraction:
        x = Fraction(x)
        xs, pairs = self._xs, self.pairs
        if x <= xs[0]:
            return pairs[0][1] + (x - xs[0])
        if x >= xs[-1]:
            return pairs[-1][1] + (x - xs[-1])
        i = bisect.bisect_right(xs, x)
        (x0, y0), (x1, y1) = pairs[i - 1], pairs[i]
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)


def base_psi(pair: MatchedNestPair) -> EndpointMap:
    """Send ``u^X_{n,i} -> u^Y_{n,i}`` and ``v^X_{n,i} -> v^Y_{n,i}`` on every level."""
    table = {}
    for n in range(pair.levels + 1):
        for jx, jy in zip(pair.intervals("X", n), pair.intervals("Y", n)):
            for x, y in ((jx.lo, jy.lo), (jx.hi, jy.hi)):
                if table.setdefault(x, y) != y:
                    raise ContractError(f"endpoint {x} is sent to two different points")
    return EndpointMap(table.items())
