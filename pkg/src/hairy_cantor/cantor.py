"""Exact-rational Cantor set approximations.

Two interval schemes are supported:

* ``CANONICAL``: level ``k`` splits every level ``k-1`` interval into
  ``4k-3`` equal parts and keeps the odd-numbered ones, so each parent has
  ``2k-1`` children.  Level 0 and level 1 are both ``[0, 1]``.
* ``MIDDLE_THIRD``: the usual ternary construction, two children per parent.

Levels are indexed so that level ``k`` holds the intervals reached by
addresses of length ``k``.  Everything here is a :class:`fractions.Fraction`;
floats only appear when output is rendered.
"""

from __future__ import annotations

import bisect
import enum
from dataclasses import dataclass
from fractions import Fraction
from math import prod
from typing import Iterable, Sequence

from .errors import AddressError, ContractError, DomainError, ResourceError

DEFAULT_INTERVAL_CAP = 10**6

Address = tuple  # tuple[int, ...], entries are 1-based


def frac_to_str(q: Fraction) -> str:
    """Serialise a rational losslessly as ``"p/q"``."""
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse_frac(raw) -> Fraction:
    if isinstance(raw, (int, Fraction)):
        return Fraction(raw)
    if isinstance(raw, str):
        return Fraction(raw.strip())
    raise ContractError(f"cannot read {raw!r} as an exact rational")


class Scheme(enum.Enum):
    CANONICAL = "canonical"
    MIDDLE_THIRD = "middle_third"

    def branching(self, k: int) -> int:
        """Number of children each level ``k-1`` interval has at level ``k``."""
        if k < 1:
            raise DomainError("branching is defined for levels k >= 1")
        return 2 * k - 1 if self is Scheme.CANONICAL else 2

    def parts(self, k: int) -> int:
        return 4 * k - 3 if self is Scheme.CANONICAL else 3

    def level_count(self, k: int) -> int:
        return prod(self.branching(j) for j in range(1, k + 1))


@dataclass(frozen=True, order=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise DomainError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi

    def to_json(self) -> dict:
        return {"lo": frac_to_str(self.lo), "hi": frac_to_str(self.hi)}

    @classmethod
    def from_json(cls, obj) -> "Interval":
        return cls(parse_frac(obj["lo"]), parse_frac(obj["hi"]))

    def __repr__(self):
        return f"[{self.lo}, {self.hi}]"


def hull(intervals: Sequence[Interval]) -> Interval:
    return Interval(intervals[0].lo, intervals[-1].hi)


def split_kept(parent: Interval, scheme: Scheme, k: int) -> list[Interval]:
    """Children of ``parent`` at level ``k``: the odd-numbered equal parts."""
    parts = scheme.parts(k)
    step = parent.length / parts
    return [
        Interval(parent.lo + i * step, parent.lo + (i + 1) * step)
        for i in range(0, parts, 2)
    ]


@dataclass(frozen=True)
class CantorApprox:
    scheme: Scheme
    depth: int
    levels: tuple  # tuple[tuple[Interval, ...], ...], levels[k] sorted by lo

    @property
    def atoms(self) -> tuple:
        """The deepest-level intervals."""
        return self.levels[-1]

    @property
    def diameter(self) -> Fraction:
        return self.atoms[-1].hi - self.atoms[0].lo

    def block_size(self, q: int, p: int) -> int:
        """How many level-``p`` intervals sit inside each level-``q`` one."""
        return prod(self.scheme.branching(k) for k in range(q + 1, p + 1))

    def parent_index(self, k: int, i: int) -> int:
        """0-based index of the level-``k-1`` parent of level-``k`` interval ``i``."""
        return i // self.scheme.branching(k)

    def ancestor_index(self, k: int, i: int, q: int) -> int:
        return i // self.block_size(q, k)

    def atom_range(self, k: int, i: int) -> range:
        """0-based atom indices lying under level-``k`` interval ``i``."""
        size = self.block_size(k, self.depth)
        return range(i * size, (i + 1) * size)

    def locate(self, x) -> int | None:
        """Index of the atom containing ``x``, or ``None`` if ``x`` is in a gap."""
        atoms = self.atoms
        i = bisect.bisect_right(self.atom_los, x) - 1
        if i >= 0 and x <= atoms[i].hi:
            return i
        return None

    @property
    def atom_los(self) -> list:
        cached = self.__dict__.get("_los")
        if cached is None:
            cached = [a.lo for a in self.atoms]
            object.__setattr__(self, "_los", cached)
        return cached

    @property
    def atom_his(self) -> list:
        cached = self.__dict__.get("_his")
        if cached is None:
            cached = [a.hi for a in self.atoms]
            object.__setattr__(self, "_his", cached)
        return cached

    def to_json(self) -> dict:
        return {
            "scheme": self.scheme.value,
            "depth": self.depth,
            "levels": [[iv.to_json() for iv in level] for level in self.levels],
        }

    @classmethod
    def from_json(cls, obj) -> "CantorApprox":
        scheme = Scheme(obj["scheme"])
        depth = int(obj["depth"])
        levels = tuple(
            tuple(Interval.from_json(iv) for iv in level) for level in obj["levels"]
        )
        c = cls(scheme, depth, levels)
        if c != build_cantor(scheme, depth):
            raise ContractError("stored levels do not match the scheme's construction")
        return c


def build_cantor(scheme: Scheme, depth: int, cap: int = DEFAULT_INTERVAL_CAP) -> CantorApprox:
    if depth < 0:
        raise DomainError("depth must be non-negative")
    count = scheme.level_count(depth)
    if count > cap:
        raise ResourceError(
            f"{scheme.value} depth {depth} needs {count} intervals (cap {cap})"
        )
    levels = [(Interval(0, 1),)]
    for k in range(1, depth + 1):
        level = []
        for parent in levels[-1]:
            level.extend(split_kept(parent, scheme, k))
        levels.append(tuple(level))
    return CantorApprox(scheme, depth, tuple(levels))


def validate_address(scheme: Scheme, address: Iterable[int]) -> Address:
    address = tuple(address)
    for j, entry in enumerate(address, start=1):
        if not isinstance(entry, int) or not 1 <= entry <= scheme.branching(j):
            raise AddressError(
                f"entry {entry!r} at position {j} outside 1..{scheme.branching(j)}"
            )
    return address


def address_index(scheme: Scheme, address: Iterable[int]) -> int:
    """0-based position, within its level, of the interval an address names."""
    address = validate_address(scheme, address)
    idx = 0
    for j, entry in enumerate(address, start=1):
        idx = idx * scheme.branching(j) + (entry - 1)
    return idx


def index_address(scheme: Scheme, level: int, idx: int) -> Address:
    entries = []
    for j in range(level, 0, -1):
        idx, r = divmod(idx, scheme.branching(j))
        entries.append(r + 1)
    if idx:
        raise AddressError(f"index out of range for level {level}")
    return tuple(reversed(entries))


def address_to_interval(c: CantorApprox, address: Iterable[int]) -> Interval:
    address = validate_address(c.scheme, address)
    if len(address) > c.depth:
        raise AddressError(f"address of length {len(address)} exceeds depth {c.depth}")
    return c.levels[len(address)][address_index(c.scheme, address)]


def is_endpoint(c: CantorApprox, x) -> bool:
    """Whether ``x`` is a finite-depth endpoint witness.

    ``x`` must be the ``lo`` or ``hi`` of an atom.  It is a witness when the
    atom borders a discarded gap or the outside of ``[0, 1]`` on that side,
    which for both schemes holds for every atom endpoint with ``depth >= 1``.
    A true endpoint of the limit set keeps this property at every deeper level.
    """
    x = Fraction(x)
    atoms = c.atoms
    i = c.locate(x)
    if i is None:
        raise DomainError(f"{x} lies in a gap at depth {c.depth}")
    atom = atoms[i]
    if x == atom.lo:
        return i == 0 or atoms[i - 1].hi < x
    if x == atom.hi:
        return i == len(atoms) - 1 or atoms[i + 1].lo > x
    raise DomainError(f"{x} is interior to the depth-{c.depth} interval {atom}")


@dataclass(frozen=True)
class ChildSelector:
    p: int
    q: int
    j: int  # 1-based parent index at level q


def children(c: CantorApprox, sel: ChildSelector) -> range:
    """1-based indices of the level-``p`` intervals inside level-``q`` interval ``j``."""
    p, q, j = sel.p, sel.q, sel.j
    if not p > q >= 0:
        raise DomainError(f"need p > q >= 0, got p={p}, q={q}")
    if p > c.depth:
        raise DomainError(f"level {p} exceeds depth {c.depth}")
    if not 1 <= j <= len(c.levels[q]):
        raise DomainError(f"parent index {j} out of range at level {q}")
    size = c.block_size(q, p)
    return range(size * (j - 1) + 1, size * j + 1)


class Layout(enum.Enum):
    """Where hairs and graph vertices go on the x-axis when drawn.

    ``TRUE_CANTOR`` uses the exact construction.  ``ADDRESS_UNIFORM`` splits a
    parent with ``b`` children into ``3b-1`` equal parts and gives each child
    two consecutive parts, so gaps are half as wide as kept intervals; this is
    the geometry of the reference plot of the canonical example.
    """

    TRUE_CANTOR = "true_cantor"
    ADDRESS_UNIFORM = "address_uniform"


def layout_levels(c: CantorApprox, layout: Layout) -> tuple:
    if layout is Layout.TRUE_CANTOR:
        return c.levels
    levels = [(Interval(0, 1),)]
    for k in range(1, c.depth + 1):
        b = c.scheme.branching(k)
        level = []
        for parent in levels[-1]:
            step = parent.length / (3 * b - 1)
            level.extend(
                Interval(parent.lo + 3 * i * step, parent.lo + (3 * i + 2) * step)
                for i in range(b)
            )
        levels.append(tuple(level))
    return tuple(levels)
