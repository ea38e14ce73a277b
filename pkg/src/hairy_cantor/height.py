"""Whitney maps and height functions on finite hair data.

A finite hair set is a metric space whose points are grouped into chains.
Each chain runs from its base to its peak, and the prefix of a chain ending
at ``x`` stands in for the arc from the base to ``x``.  The Whitney map used
throughout is the sum of pairwise distances.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .cantor import frac_to_str, parse_frac
from .errors import ContractError, DomainError


@dataclass(frozen=True)
class FiniteMetricSpace:
    points: tuple  # labels
    dist: tuple  # dist[i][j], exact rationals

    def __post_init__(self):
        n = len(self.points)
        dist = tuple(tuple(parse_frac(v) for v in row) for row in self.dist)
        if len(dist) != n or any(len(row) != n for row in dist):
            raise ContractError(f"distance matrix must be {n}x{n}")
        object.__setattr__(self, "dist", dist)
        problem = self.metric_violation()
        if problem:
            raise ContractError(problem)

    def __len__(self) -> int:
        return len(self.points)

    def metric_violation(self) -> str | None:
        d, n = self.dist, len(self.points)
        for i in range(n):
            if d[i][i] != 0:
                return f"d({i}, {i}) = {d[i][i]} is not zero"
            for j in range(i + 1, n):
                if d[i][j] != d[j][i]:
                    return f"d({i}, {j}) != d({j}, {i})"
                if d[i][j] <= 0:
                    return f"d({i}, {j}) = {d[i][j]} is not positive"
        for i, j, k in itertools.permutations(range(n), 3):
            if d[i][k] > d[i][j] + d[j][k]:
                return f"triangle inequality fails for {i}, {j}, {k}"
        return None

    @classmethod
    def from_coordinates(cls, coords: Sequence[tuple], labels=None) -> "FiniteMetricSpace":
        """Points of the integer lattice with the L1 metric, so every distance
        is exact."""
        dist = [[sum(abs(a - b) for a, b in zip(p, q)) for q in coords] for p in coords]
        return cls(tuple(labels or range(len(coords))), tuple(map(tuple, dist)))


def seeded_space(n: int, seed: int, box: int = 20) -> FiniteMetricSpace:
    """``n`` distinct seeded lattice points in ``[0, box)^2``, L1 metric."""
    rng = random.Random(seed)
    cells = rng.sample(range(box * box), n)
    return FiniteMetricSpace.from_coordinates([divmod(c, box) for c in cells])


def whitney_measure(s: FiniteMetricSpace, subset: Iterable[int]) -> Fraction:
    """Sum of ``d(p, q)`` over unordered pairs of distinct points in ``subset``."""
    pts = sorted(set(subset))
    if not pts:
        raise DomainError("the Whitney map is defined on non-empty sets")
    if pts[0] < 0 or pts[-1] >= len(s):
        raise DomainError("subset refers to a point outside the space")
    return sum((s.dist[p][q] for p, q in itertools.combinations(pts, 2)), Fraction(0))


@dataclass(frozen=True)
class AbstractHairData:
    chains: tuple  # each chain is a tuple of point indices, base first

    def __post_init__(self):
        chains = tuple(tuple(c) for c in self.chains)
        object.__setattr__(self, "chains", chains)
        seen = set()
        for chain in chains:
            if not chain:
                raise ContractError("empty chain")
            if len(set(chain)) != len(chain):
                raise ContractError(f"chain {list(chain)} repeats a point")
            if seen & set(chain):
                raise ContractError("chains must be disjoint")
            seen |= set(chain)
        object.__setattr__(self, "_where", {p: (c, i) for c, ch in enumerate(chains) for i, p in enumerate(ch)})

    @property
    def points(self) -> list:
        return sorted(self._where)

    @property
    def bases(self) -> list:
        return [c[0] for c in self.chains]

    def base(self, x: int) -> int:
        c, _ = self._where[x]
        return self.chains[c][0]

    def peak(self, x: int) -> int:
        c, _ = self._where[x]
        return self.chains[c][-1]

    def arc(self, x: int) -> tuple:
        """The chain prefix from the base of ``x`` up to ``x``."""
        c, i = self._where[x]
        return self.chains[c][: i + 1]


def height_function(d: AbstractHairData, s: FiniteMetricSpace) -> dict:
    """``h(x) = mu(arc(x))`` for every point."""
    if d.points != list(range(len(s))):
        raise ContractError("the chains must partition the points of the metric space")
    return {x: whitney_measure(s, d.arc(x)) for x in d.points}


@dataclass
class EmbeddedHairs:
    coords: dict  # point -> (g(b(x)), h(x))
    columns: dict  # g(base) -> heights along the chain, base first

    @property
    def injective(self) -> bool:
        return all(a != b for a, b in itertools.combinations(self.coords.values(), 2))


def abstract_uniformize(
    d: AbstractHairData, s: FiniteMetricSpace, g: Mapping[int, Fraction] | Callable
) -> EmbeddedHairs:
    """Place each point at ``(g(b(x)), h(x))``."""
    g = g if callable(g) else g.__getitem__
    xs = {b: Fraction(g(b)) for b in d.bases}
    if len(set(xs.values())) != len(xs):
        raise ContractError("g must be injective on the bases")
    h = height_function(d, s)
    coords = {x: (xs[d.base(x)], h[x]) for x in d.points}
    columns = {xs[c[0]]: [h[x] for x in c] for c in d.chains}
    out = EmbeddedHairs(coords, columns)
    if not out.injective:
        raise ContractError("embedding is not injective")
    return out


@dataclass
class AxiomVerdict:
    axiom: str
    status: str  # "holds", "fails", "not falsifiable at finite scale", "not applicable"
    note: str = ""


def check_axioms(d: AbstractHairData, s: FiniteMetricSpace) -> list:
    """What finite data can say about each axiom."""
    h = height_function(d, s)
    arcs_ok = all(
        all(h[a] < h[b] for a, b in zip(c, c[1:])) for c in d.chains
    )
    verdicts = [
        AxiomVerdict("A1", "holds" if arcs_ok else "fails", "components are single points or ordered chains"),
        AxiomVerdict("A2", "not falsifiable at finite scale", f"{len(d.chains)} base points"),
        AxiomVerdict("A3", "holds", "every chain starts at its base"),
        AxiomVerdict("A4", "not falsifiable at finite scale", "Hausdorff convergence of arcs needs limits"),
        AxiomVerdict("A5", "not applicable", "accessibility is a planar notion"),
    ]
    hairy = sum(len(c) > 1 for c in d.chains)
    verdicts.append(
        AxiomVerdict(
            "A6",
            "holds" if hairy else "fails",
            f"{hairy} chains carry points off the base",
        )
    )
    verdicts.append(AxiomVerdict("A6'", "not falsifiable at finite scale", "density needs limits"))
    return verdicts


def seeded_hair_data(n: int, seed: int, box: int = 30) -> tuple:
    """A seeded ``(AbstractHairData, FiniteMetricSpace)`` with ``n`` points."""
    rng = random.Random(seed)
    s = seeded_space(n, seed, box)
    order = list(range(n))
    rng.shuffle(order)
    chains = []
    while order:
        k = rng.randint(1, min(4, len(order)))
        chains.append(tuple(order[:k]))
        order = order[k:]
    return AbstractHairData(tuple(chains)), s


def hair_data_to_json(d: AbstractHairData, s: FiniteMetricSpace) -> dict:
    return {
        "points": list(s.points),
        "dist": [[frac_to_str(v) for v in row] for row in s.dist],
        "chains": [list(c) for c in d.chains],
    }


def hair_data_from_json(obj) -> tuple:
    s = FiniteMetricSpace(tuple(obj["points"]), tuple(tuple(r) for r in obj["dist"]))
    d = AbstractHairData(tuple(tuple(c) for c in obj["chains"]))
    return d, s
