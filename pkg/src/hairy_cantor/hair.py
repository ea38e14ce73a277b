"""Length functions on finite Cantor approximations.

A :class:`LengthModel` stores one exact value per atom (deepest interval)
together with the maxima ``Max(l, I)`` of every interval of every level.  At
finite depth the stored values are upper bounds for the limiting length
function, and every "limit" statement is checked as a monotone-decay report.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .cantor import (
    Address,
    CantorApprox,
    Interval,
    Layout,
    Scheme,
    address_index,
    build_cantor,
    frac_to_str,
    index_address,
    layout_levels,
    parse_frac,
    validate_address,
)
from .errors import AddressError, ContractError, DomainError


def level_maxima(c: CantorApprox, values: Sequence[Fraction]) -> tuple:
    """Interval maxima for every level, computed bottom-up from atom values."""
    maxima = [tuple(values)]
    for k in range(c.depth, 0, -1):
        b = c.scheme.branching(k)
        below = maxima[0]
        maxima.insert(0, tuple(max(below[i : i + b]) for i in range(0, len(below), b)))
    return tuple(maxima)


@dataclass(frozen=True)
class LengthModel:
    cantor: CantorApprox
    values: tuple  # one Fraction per atom, left to right
    interval_max: tuple = field(default=None)  # interval_max[k][i] = Max(l, level-k interval i)

    def __post_init__(self):
        values = tuple(Fraction(v) for v in self.values)
        if len(values) != len(self.cantor.atoms):
            raise ContractError(
                f"{len(values)} values for {len(self.cantor.atoms)} atoms"
            )
        if any(v < 0 for v in values):
            raise ContractError("length values must be non-negative")
        object.__setattr__(self, "values", values)
        if self.interval_max is None:
            object.__setattr__(self, "interval_max", level_maxima(self.cantor, values))

    @property
    def depth(self) -> int:
        return self.cantor.depth

    @property
    def scheme(self) -> Scheme:
        return self.cantor.scheme

    def value_at(self, address: Iterable[int]) -> Fraction:
        address = validate_address(self.scheme, address)
        if len(address) != self.depth:
            raise AddressError(f"need an address of length {self.depth}")
        return self.values[address_index(self.scheme, address)]

    def point_values(self) -> dict:
        """Map from full-length address to stored value."""
        return {
            index_address(self.scheme, self.depth, i): v
            for i, v in enumerate(self.values)
        }

    def with_values(self, values: Sequence[Fraction]) -> "LengthModel":
        return LengthModel(self.cantor, tuple(values))

    def scaled(self, factor) -> "LengthModel":
        factor = Fraction(factor)
        return self.with_values([factor * v for v in self.values])

    def consistency_violation(self):
        """First ``(level, index)`` whose stored maximum disagrees with a
        bottom-up recomputation, or ``None``."""
        fresh = level_maxima(self.cantor, self.values)
        for k, (stored, recomputed) in enumerate(zip(self.interval_max, fresh)):
            for i, (a, b) in enumerate(zip(stored, recomputed)):
                if a != b:
                    return k, i
        return None

    def to_json(self) -> dict:
        return {
            "cantor": self.cantor.to_json(),
            "values": [
                {"address": list(index_address(self.scheme, self.depth, i)), "l": frac_to_str(v)}
                for i, v in enumerate(self.values)
            ],
        }

    @classmethod
    def from_json(cls, obj) -> "LengthModel":
        c = CantorApprox.from_json(obj["cantor"])
        values = [None] * len(c.atoms)
        for entry in obj["values"]:
            address = tuple(entry["address"])
            if len(address) != c.depth:
                raise AddressError(f"address {address} has the wrong length")
            values[address_index(c.scheme, address)] = parse_frac(entry["l"])
        if any(v is None for v in values):
            raise ContractError("hair-set JSON does not give a value for every atom")
        return cls(c, tuple(values))


@dataclass(frozen=True)
class HairPoint:
    x: Fraction
    y: Fraction

    @classmethod
    def on(cls, l: LengthModel, address: Address, y) -> "HairPoint":
        y = Fraction(y)
        top = l.value_at(address)
        if not 0 <= y <= top:
            raise DomainError(f"height {y} outside [0, {top}]")
        i = address_index(l.scheme, address)
        return cls(l.cantor.atoms[i].midpoint, y)


# --- the canonical example -------------------------------------------------


def canonical_factor(j: int, entry: int) -> Fraction:
    return 1 - abs(Fraction(entry, j) - 1)


def canonical_length(address: Iterable[int]) -> Fraction:
    """``l_n`` at a canonical address: the product of ``1 - |i_j/j - 1|``."""
    address = validate_address(Scheme.CANONICAL, address)
    value = Fraction(1)
    for j, entry in enumerate(address, start=1):
        value *= canonical_factor(j, entry)
    return value


def canonical_model(depth: int, cantor: CantorApprox | None = None) -> LengthModel:
    c = cantor or build_cantor(Scheme.CANONICAL, depth)
    if c.scheme is not Scheme.CANONICAL or c.depth != depth:
        raise ContractError("canonical_model needs a canonical approximation of that depth")
    values = [Fraction(1)]
    for k in range(1, depth + 1):
        factors = [canonical_factor(k, i) for i in range(1, 2 * k)]
        values = [v * f for v in values for f in factors]
    return LengthModel(c, tuple(values))


class PiecewiseLinear:
    """Continuous piecewise-linear function, constant beyond its end knots."""

    def __init__(self, knots: Sequence[tuple]):
        knots = [(Fraction(x), Fraction(y)) for x, y in knots]
        if not knots or any(a[0] > b[0] for a, b in zip(knots, knots[1:])):
            raise ContractError("knots must be non-empty and sorted by x")
        self.knots = knots
        self._xs = [x for x, _ in knots]

    def __call__(self, x) -> Fraction:
        x = Fraction(x)
        xs, knots = self._xs, self.knots
        if x <= xs[0]:
            return knots[0][1]
        if x >= xs[-1]:
            return knots[-1][1]
        i = bisect.bisect_right(xs, x)
        (x0, y0), (x1, y1) = knots[i - 1], knots[i]
        if x1 == x0:
            return y1
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)


def canonical_graph(n: int, layout: Layout = Layout.TRUE_CANTOR) -> PiecewiseLinear:
    """The continuous function ``l_n``: constant on each level-``n`` interval,
    linear across gaps, constant outside ``[0, 1]``."""
    if n < 1:
        raise DomainError("graph depth must be at least 1")
    model = canonical_model(n)
    intervals = layout_levels(model.cantor, layout)[n]
    knots = []
    for iv, v in zip(intervals, model.values):
        knots.append((iv.lo, v))
        knots.append((iv.hi, v))
    return PiecewiseLinear(knots)


# --- maxima ----------------------------------------------------------------


def atoms_inside(c: CantorApprox, interval: Interval) -> range:
    """0-based indices of the atoms contained in ``interval``."""
    start = bisect.bisect_left(c.atom_los, interval.lo)
    stop = bisect.bisect_right(c.atom_his, interval.hi)
    return range(start, max(start, stop))


def argmax_leftmost(values: Sequence[Fraction], lo: int, hi: int) -> int:
    """Index of the leftmost maximum of ``values[lo:hi + 1]``."""
    best = lo
    for i in range(lo + 1, hi + 1):
        if values[i] > values[best]:
            best = i
    return best


def max_over(l: LengthModel, interval: Interval) -> tuple:
    """``(Max(l, I), maximizer atom)`` with the leftmost maximizer."""
    inside = atoms_inside(l.cantor, interval)
    if not inside:
        raise DomainError(f"{interval} contains no depth-{l.depth} interval")
    i = argmax_leftmost(l.values, inside.start, inside.stop - 1)
    return l.values[i], l.cantor.atoms[i]


@dataclass
class UscReport:
    address: Address
    sequence: list
    passed: bool
    first_offending_level: int | None = None


def check_usc_limit(l: LengthModel, address: Iterable[int]) -> UscReport:
    """Maxima over the nested intervals of ``address`` must decrease to its value."""
    address = validate_address(l.scheme, address)
    if len(address) != l.depth:
        raise AddressError(f"need an address of length {l.depth}")
    seq = [
        l.interval_max[k][address_index(l.scheme, address[:k])]
        for k in range(l.depth + 1)
    ]
    for k in range(1, len(seq)):
        if seq[k] > seq[k - 1]:
            return UscReport(address, seq, False, k)
    if seq[-1] != l.value_at(address):
        return UscReport(address, seq, False, l.depth)
    return UscReport(address, seq, True)


@dataclass
class DensityStats:
    sup: Fraction
    max_gap: Fraction


def peak_density_stats(l: LengthModel) -> DensityStats:
    """Largest hole in the set of stored heights, with 0 and the sup as anchors."""
    sup = max(l.values)
    levels = sorted(set(l.values) | {Fraction(0), sup})
    gap = max((b - a for a, b in zip(levels, levels[1:])), default=Fraction(0))
    return DensityStats(sup, gap)


# --- the defining properties at finite depth --------------------------------


@dataclass
class CheckResult:
    name: str
    passed: bool
    witness: str | None = None
    # per step: (step, level, worst value, bound, location)
    rows: list = field(default_factory=list)


@dataclass
class ShcsReport:
    density: CheckResult
    endpoint_decay: CheckResult
    two_sided: CheckResult
    levels: tuple

    @property
    def checks(self) -> tuple:
        return (self.density, self.endpoint_decay, self.two_sided)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _calibrated(worst: dict, step: int) -> Callable[[int], Fraction]:
    constant = step * worst[step]
    return lambda k: constant / k


def _decay_check(name, worst, where, levels, schedule, first_step):
    rows = []
    witness = None
    for k in sorted(worst):
        if k < first_step:
            continue
        bound = Fraction(schedule(k))
        rows.append((k, levels[k], worst[k], bound, where[k]))
        if witness is None and worst[k] > bound:
            witness = (
                f"step {k} (level {levels[k]}): {worst[k]} exceeds {bound} "
                f"at {where[k]}"
            )
    return CheckResult(name, witness is None, witness, rows)


def check_shcs_definition(
    l: LengthModel,
    levels: Sequence[int] | None = None,
    schedule: Callable[[int], Fraction] | None = None,
    calibration_step: int = 3,
) -> ShcsReport:
    """Finite-depth verdicts for the three defining properties.

    ``levels`` is the nest the decay is measured along (default every level
    ``0..depth``); step ``k`` compares level ``levels[k]`` with its parents at
    ``levels[k-1]``.

    * density: every interval of the finest nest level carries a positive value;
    * endpoint decay: the largest maximum among first/last children at step
      ``k`` is at most ``schedule(k)``;
    * two-sided: where a parent's maximizer child is interior, its maximum is
      within ``schedule(k)`` of both neighbouring children's maxima.

    Without a schedule the bound is ``C/k`` with ``C`` fitted at
    ``calibration_step``, and steps before it are not judged.
    """
    levels = tuple(range(l.depth + 1)) if levels is None else tuple(levels)
    if any(a >= b for a, b in zip(levels, levels[1:])) or levels[-1] > l.depth:
        raise DomainError("nest levels must increase and stay within the model depth")
    steps = len(levels) - 1
    if schedule is None and steps < calibration_step:
        raise DomainError(f"need at least {calibration_step} refinement steps")
    c = l.cantor

    finest = levels[-1]
    density = CheckResult("density", True)
    for i, m in enumerate(l.interval_max[finest]):
        if m <= 0:
            density = CheckResult(
                "density",
                False,
                f"level-{finest} interval #{i + 1} {c.levels[finest][i]} has no positive value",
            )
            break

    edge_worst, edge_where, mid_worst, mid_where = {}, {}, {}, {}
    for k in range(1, steps + 1):
        q, p = levels[k - 1], levels[k]
        size = c.block_size(q, p)
        maxima = l.interval_max[p]
        e_best, e_at, m_best, m_at = Fraction(0), None, Fraction(0), None
        for j in range(len(l.interval_max[q])):
            first, last = j * size, (j + 1) * size - 1
            for i in (first, last):
                if e_at is None or maxima[i] > e_best:
                    e_best, e_at = maxima[i], c.levels[p][i]
            top = argmax_leftmost(maxima, first, last)
            if first < top < last:
                d = max(maxima[top] - maxima[top - 1], maxima[top] - maxima[top + 1])
                if m_at is None or d > m_best:
                    m_best, m_at = d, c.levels[p][top]
        edge_worst[k], edge_where[k] = e_best, e_at
        mid_worst[k], mid_where[k] = m_best, m_at

    if schedule is None:
        edge_schedule = _calibrated(edge_worst, calibration_step)
        mid_schedule = _calibrated(mid_worst, calibration_step)
        first_step = calibration_step
    else:
        edge_schedule = mid_schedule = schedule
        first_step = 1
    return ShcsReport(
        density,
        _decay_check("endpoint_decay", edge_worst, edge_where, levels, edge_schedule, first_step),
        _decay_check("two_sided", mid_worst, mid_where, levels, mid_schedule, first_step),
        levels,
    )
