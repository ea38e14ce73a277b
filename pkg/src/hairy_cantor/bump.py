"""Bump functions: running-max envelopes of a length model.

On ``[u, v]`` with maximizer ``m`` the bump is ``Max(l, [u, x])`` left of
``m`` and ``Max(l, [x, v])`` right of it.  It is stored as one value per atom
(a step envelope); in a gap the running max carries over from the side
facing away from ``m``.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .cantor import Interval, frac_to_str
from .errors import ContractError, DomainError
from .hair import LengthModel, argmax_leftmost, atoms_inside


def envelope(raw: Sequence[Fraction], peak: int) -> list:
    """Prefix maxima up to ``peak`` and suffix maxima after it."""
    out = list(raw)
    for i in range(1, peak + 1):
        out[i] = max(out[i], out[i - 1])
    for i in range(len(out) - 2, peak - 1, -1):
        out[i] = max(out[i], out[i + 1])
    return out


@dataclass(frozen=True)
class BumpFunction:
    interval: Interval
    atoms: tuple  # atoms inside ``interval``, left to right
    raw: tuple  # the length values on those atoms
    values: tuple  # envelope value on each atom
    peak: int  # position of the maximizer within ``atoms``

    def __post_init__(self):
        object.__setattr__(self, "_los", [a.lo for a in self.atoms])

    @property
    def maximizer(self) -> Interval:
        return self.atoms[self.peak]

    @property
    def top(self) -> Fraction:
        return self.values[self.peak]

    @property
    def breakpoints(self) -> list:
        pts = []
        for atom, v in zip(self.atoms, self.values):
            pts.append((atom.lo, v))
            pts.append((atom.hi, v))
        return pts

    def position(self, x) -> int:
        """Atom whose envelope value holds at ``x``."""
        if x not in self.interval:
            raise DomainError(f"{x} outside {self.interval}")
        i = bisect.bisect_right(self._los, x) - 1
        if x > self.atoms[i].hi and i + 1 > self.peak:
            i += 1
        return i

    def __call__(self, x) -> Fraction:
        return self.values[self.position(x)]

    def to_csv_rows(self) -> list:
        return [(frac_to_str(x), frac_to_str(v)) for x, v in self.breakpoints]


def make_bump(l: LengthModel, interval: Interval, maximizer=None) -> BumpFunction:
    """Bump of ``l`` on the atoms inside ``interval``.

    ``maximizer`` may be an atom :class:`Interval` or a global atom index; by
    default the leftmost maximizer is used.
    """
    inside = atoms_inside(l.cantor, interval)
    if not inside:
        raise DomainError(f"{interval} contains no atom")
    if maximizer is None:
        m = argmax_leftmost(l.values, inside.start, inside.stop - 1)
    elif isinstance(maximizer, Interval):
        m = l.cantor.locate(maximizer.lo)
        if m is None or l.cantor.atoms[m] != maximizer:
            raise ContractError(f"{maximizer} is not an atom")
    else:
        m = int(maximizer)
    if m not in inside:
        raise ContractError(f"maximizer atom #{m} is not inside {interval}")
    raw = l.values[inside.start : inside.stop]
    peak = m - inside.start
    if raw[peak] != max(raw):
        raise ContractError(
            f"atom #{m} has value {raw[peak]}, below Max(l, I) = {max(raw)}"
        )
    return BumpFunction(
        Interval(l.cantor.atoms[inside.start].lo, l.cantor.atoms[inside.stop - 1].hi),
        l.cantor.atoms[inside.start : inside.stop],
        tuple(raw),
        tuple(envelope(raw, peak)),
        peak,
    )


@dataclass
class BumpReport:
    monotone: bool
    inversion: int | None  # first atom position where monotonicity breaks
    anchored: bool  # end values and peak value agree with the raw data
    max_jump: Fraction
    raw_max_jump: Fraction

    @property
    def continuous(self) -> bool:
        return self.max_jump <= self.raw_max_jump

    @property
    def passed(self) -> bool:
        return self.monotone and self.anchored and self.continuous


def _max_step(seq) -> Fraction:
    return max((abs(b - a) for a, b in zip(seq, seq[1:])), default=Fraction(0))


def verify_bump(b: BumpFunction) -> BumpReport:
    inversion = None
    for i in range(len(b.values) - 1):
        rising = i < b.peak
        if (rising and b.values[i] > b.values[i + 1]) or (
            not rising and b.values[i] < b.values[i + 1]
        ):
            inversion = i
            break
    anchored = (
        b.values[0] == b.raw[0]
        and b.values[-1] == b.raw[-1]
        and b.values[b.peak] == max(b.raw)
    )
    return BumpReport(
        inversion is None, inversion, anchored, _max_step(b.values), _max_step(b.raw)
    )


class PartitionBump:
    """Bumps on the intervals of a partition, zero off the partition."""

    def __init__(self, bumps: Sequence[BumpFunction]):
        self.bumps = list(bumps)
        self._los = [bp.interval.lo for bp in self.bumps]

    def block(self, x) -> int | None:
        i = bisect.bisect_right(self._los, x) - 1
        if i >= 0 and x <= self.bumps[i].interval.hi:
            return i
        return None

    def __call__(self, x) -> Fraction:
        i = self.block(x)
        return Fraction(0) if i is None else self.bumps[i](x)


def partition_bump(l: LengthModel, intervals: Sequence[Interval], maximizers=None) -> PartitionBump:
    maximizers = maximizers or [None] * len(intervals)
    return PartitionBump(make_bump(l, iv, m) for iv, m in zip(intervals, maximizers))
