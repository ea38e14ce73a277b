"""Plane homeomorphisms acting on hair sets.

Two families live here:

* vertical shears ``H_n`` built from a matched nest pair.  Each one rescales
  hairs over a level-``n`` block by the constant ``eta``, so the composition
  ``phi_N = H_N o ... o H_1`` carries the X hair set to one whose block maxima
  are Y's;
* horizontal shuffles, which permute the level-``m_n`` blocks inside each
  level-``m_{n-1}`` block of a middle-third model until the maxima are small
  at block ends and vary slowly between neighbours.

All arithmetic is exact.  Shears act on the plane with X rescaled so that its
maximum is 1/2, which keeps every bump strictly below 1.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from fractions import Fraction
from math import prod
from typing import Sequence

from .bump import PartitionBump, partition_bump
from .cantor import Interval, Scheme, frac_to_str
from .errors import ContractError, DomainError, ResourceError
from .hair import LengthModel, check_shcs_definition
from .matching import MatchedNestPair

HALF = Fraction(1, 2)


# --- vertical shears ---------------------------------------------------------


@dataclass(frozen=True)
class EtaFunction:
    """Blockwise-constant factor on the X partition of one level, 1 elsewhere."""

    level: int
    blocks: tuple  # X intervals, left to right
    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "_los", [b.lo for b in self.blocks])

    def block(self, x) -> int | None:
        i = bisect.bisect_right(self._los, x) - 1
        if i >= 0 and x <= self.blocks[i].hi:
            return i
        return None

    def __call__(self, x) -> Fraction:
        i = self.block(x)
        return Fraction(1) if i is None else self.factors[i]

    def violations(self) -> list:
        bound = Fraction(1, 2 ** (self.level + 1))
        return [
            (i, f) for i, f in enumerate(self.factors) if not abs(f - 1) < bound
        ]


def make_eta(pair: MatchedNestPair, n: int) -> EtaFunction:
    if not 1 <= n <= pair.levels:
        raise DomainError(f"level {n} not in 1..{pair.levels}")
    for j in set(pair.parents[n]):
        if pair.x_max[n - 1][j] == 0 or pair.y_max[n - 1][j] == 0:
            raise ContractError(f"level {n - 1} block {j + 1} has zero maximum")
    eta = EtaFunction(n, tuple(pair.intervals("X", n)), tuple(pair.ratios[n]))
    bad = eta.violations()
    if bad:
        i, f = bad[0]
        raise ContractError(f"level {n}: eta = {f} on block {i + 1} is too far from 1")
    return eta


def shear_y(eta: Fraction, knot: Fraction, y: Fraction) -> Fraction:
    """The piecewise-linear map of ``[0, 1]`` fixing 0 and 1 and sending ``knot``
    to ``eta * knot``."""
    if y <= knot:
        return eta * y
    return 1 - (1 - eta * knot) / (1 - knot) * (1 - y)


def unshear_y(eta: Fraction, knot: Fraction, y: Fraction) -> Fraction:
    return shear_y(1 / eta, eta * knot, y)


@dataclass(frozen=True)
class VerticalShear:
    level: int
    bump: PartitionBump
    eta: EtaFunction

    def data(self, x) -> tuple:
        """``(eta(x), B(x))``; both are constant along the vertical line."""
        return self.eta(x), self.bump(x)

    def __call__(self, p) -> tuple:
        x, y = p
        if not (0 <= x <= 1 and 0 <= y <= 1):
            return p
        e, b = self.data(x)
        if e == 1:
            return p
        return x, shear_y(e, b, Fraction(y))

    def inverse(self, p) -> tuple:
        x, y = p
        if not (0 <= x <= 1 and 0 <= y <= 1):
            return p
        e, b = self.data(x)
        if e == 1:
            return p
        return x, unshear_y(e, b, Fraction(y))


def apply_shear(h: VerticalShear, p) -> tuple:
    return h(p)


@dataclass
class ComposedVerticalMap:
    shears: list
    models: list  # models[n] = current (normalised) model after n shears
    scale: Fraction  # X is multiplied by this before the first shear

    @property
    def levels(self) -> int:
        return len(self.shears)

    def __call__(self, p, upto: int | None = None) -> tuple:
        for h in self.shears[: self.levels if upto is None else upto]:
            p = h(p)
        return p

    def cumulative(self, atom: int, upto: int | None = None) -> Fraction:
        """Product of the eta factors seen by the hair over ``atom``."""
        upto = self.levels if upto is None else upto
        x = self.models[0].cantor.atoms[atom].midpoint
        return prod((h.eta(x) for h in self.shears[:upto]), start=Fraction(1))


@dataclass
class ComposeReport:
    levels: int
    step_sup: list  # step_sup[n - 1] = measured sup |phi_n - phi_{n-1}|
    step_bound: list  # 2^-n
    tips_exact: bool  # phi_N sends every hair tip to the tip of models[N]
    product_bound: Fraction  # prod_{k <= N} (1 - 2^-k)
    samples: int

    @property
    def passed(self) -> bool:
        return self.tips_exact and all(
            s <= b for s, b in zip(self.step_sup, self.step_bound)
        )


def injectivity_products(n: int) -> list:
    """Partial products ``prod_{k <= m} (1 - 2^-k)`` for ``m = 1..n``, exact."""
    out, acc = [], Fraction(1)
    for k in range(1, n + 1):
        acc *= 1 - Fraction(1, 2**k)
        out.append(acc)
    return out


def build_composition(pair: MatchedNestPair, N: int, lX: LengthModel) -> ComposedVerticalMap:
    if not 1 <= N <= pair.levels:
        raise DomainError(f"need 1 <= N <= {pair.levels}, got {N}")
    if lX.cantor != pair.cantor:
        raise ContractError("model and nest pair live on different Cantor sets")
    top = lX.interval_max[0][0]
    if top <= 0:
        raise ContractError("X needs a positive maximum")
    scale = HALF / top
    current = lX.scaled(scale)
    models, shears = [current], []
    atoms = pair.cantor.atoms
    for n in range(1, N + 1):
        eta = make_eta(pair, n)
        blocks = pair.intervals("X", n)
        bump = partition_bump(current, blocks)
        if max(current.values) >= 1:
            raise ContractError(f"level {n}: bump reaches 1, shear undefined")
        shears.append(VerticalShear(n, bump, eta))
        factor = [None] * len(atoms)
        for (a, b), f in zip(pair.x_blocks[n], eta.factors):
            for t in range(a, b + 1):
                factor[t] = f
        current = current.with_values(
            [v * (f if f is not None else 1) for v, f in zip(current.values, factor)]
        )
        models.append(current)
    return ComposedVerticalMap(shears, models, scale)


def compose_and_bound(
    pair: MatchedNestPair, N: int, lX: LengthModel, grid: int = 200
) -> tuple:
    """Build ``phi_N`` and measure each step's sup displacement.

    The sample is the ``grid x grid`` lattice ``(i/(grid-1), j/(grid-1))``
    plus every hair tip.  Returns ``(ComposedVerticalMap, ComposeReport)``.
    """
    phi = build_composition(pair, N, lX)
    atoms = pair.cantor.atoms
    sup = [Fraction(0)] * N
    ticks = [Fraction(i, grid - 1) for i in range(grid)]

    for x in ticks:
        data = [h.data(x) for h in phi.shears]
        if all(e == 1 for e, _ in data):
            continue
        for y in ticks:
            for n, (e, b) in enumerate(data):
                if e != 1:
                    y2 = shear_y(e, b, y)
                    sup[n] = max(sup[n], abs(y2 - y))
                    y = y2

    tips_exact = True
    for t, atom in enumerate(atoms):
        x, y = atom.midpoint, phi.models[0].values[t]
        for n, h in enumerate(phi.shears):
            _, y2 = h((x, y))
            sup[n] = max(sup[n], abs(y2 - y))
            y = y2
        tips_exact &= y == phi.models[N].values[t]

    report = ComposeReport(
        N,
        sup,
        [Fraction(1, 2**n) for n in range(1, N + 1)],
        tips_exact,
        injectivity_products(N)[-1],
        grid * grid + len(atoms),
    )
    return phi, report


def transfer_length(pair: MatchedNestPair, N: int, lX: LengthModel) -> LengthModel:
    """``(Max(l^Y, J_{N,i}) / Max(l^X, J_{N,i})) * l^X`` on each level-``N`` X block."""
    if not 0 <= N <= pair.levels:
        raise DomainError(f"need 0 <= N <= {pair.levels}, got {N}")
    values = list(lX.values)
    for (a, b), mx, my in zip(pair.x_blocks[N], pair.x_max[N], pair.y_max[N]):
        ratio = my / mx if mx else Fraction(0)
        for t in range(a, b + 1):
            values[t] = ratio * values[t]
    return lX.with_values(values)


@dataclass
class TransferBounds:
    low: Fraction  # smallest telescoped eta product over level-N blocks
    high: Fraction
    zero_set_preserved: bool

    @property
    def passed(self) -> bool:
        return self.zero_set_preserved and self.low >= LOWER_RATIO and self.high <= UPPER_RATIO


# e^-1 and e^(1/2), rounded inwards to rationals.
LOWER_RATIO = Fraction(36788, 100000)
UPPER_RATIO = Fraction(164872, 100000)


def transfer_bounds(pair: MatchedNestPair, N: int, lX: LengthModel) -> TransferBounds:
    """Range of ``prod_{n <= N} eta_n`` and whether ``l = 0`` is preserved."""
    base = pair.y_max[0][0] / pair.x_max[0][0]
    out = transfer_length(pair, N, lX)
    ratios = [my / mx / base for mx, my in zip(pair.x_max[N], pair.y_max[N]) if mx]
    zero_ok = all((a == 0) == (b == 0) for a, b in zip(lX.values, out.values))
    return TransferBounds(min(ratios), max(ratios), zero_ok)


# --- shuffles ------------------------------------------------------------------


def interleave_order(values: Sequence[Fraction]) -> list:
    """Source block for each position: sorted ascending, then laid out as
    ``v1, v3, v5, ..., v6, v4, v2``.  Equal values give the identity."""
    n = len(values)
    if all(v == values[0] for v in values):
        return list(range(n))
    order = sorted(range(n), key=lambda i: values[i])
    return order[0::2] + order[1::2][::-1]


def _is_net(children: Sequence[Fraction], eps: Fraction) -> bool:
    """Whether the values are an ``eps``-net of ``[0, max(children)]``."""
    s = sorted(children)
    return s[0] < eps and all(b - a < 2 * eps for a, b in zip(s, s[1:]))


def net_level(l: LengthModel, n: int, prev: int) -> int | None:
    """Smallest ``m > prev`` whose blocks' maxima form a ``1/4n``-net inside
    every level-``prev`` block, or ``None`` if the depth runs out."""
    eps = Fraction(1, 4 * n)
    for m in range(prev + 1, l.depth + 1):
        size = 2 ** (m - prev)
        maxima = l.interval_max[m]
        if all(
            _is_net(maxima[j * size : (j + 1) * size], eps)
            for j in range(len(l.interval_max[prev]))
        ):
            return m
    return None


@dataclass
class Inequality:
    kind: str  # "boundary" or "adjacent"
    level: int
    blocks: tuple  # 1-based block indices at ``level``
    value: Fraction
    bound: Fraction

    @property
    def holds(self) -> bool:
        return self.value < self.bound

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "level": self.level,
            "blocks": list(self.blocks),
            "value": frac_to_str(self.value),
            "bound": frac_to_str(self.bound),
            "holds": self.holds,
        }


@dataclass
class ShuffleStage:
    n: int
    prev_level: int
    level: int
    sigmas: list  # sigmas[j][k] = source offset placed at offset k of parent j
    offsets: list  # translation of each source level-``level`` block, by source index
    displacement: Fraction
    certificate: list
    model: LengthModel
    atom_source: list  # atom_source[t] = atom of the previous model now at atom t

    @property
    def certified(self) -> bool:
        return all(q.holds for q in self.certificate)

    def to_json(self) -> dict:
        return {
            "stage": self.n,
            "m_prev": self.prev_level,
            "m": self.level,
            "sigmas": [[k + 1 for k in s] for s in self.sigmas],
            "displacement": frac_to_str(self.displacement),
            "bound": frac_to_str(Fraction(1, 3**self.prev_level)),
            "certified": self.certified,
            "inequalities": [q.to_json() for q in self.certificate],
        }


def stage_certificate(l: LengthModel, n: int, prev: int, m: int) -> list:
    bound = Fraction(1, n)
    size = 2 ** (m - prev)
    maxima = l.interval_max[m]
    out = []
    for j in range(len(l.interval_max[prev])):
        first, last = j * size, (j + 1) * size - 1
        for i in (first, last) if first != last else (first,):
            out.append(Inequality("boundary", m, (i + 1,), maxima[i], bound))
        for i in range(first, last):
            out.append(
                Inequality("adjacent", m, (i + 1, i + 2), abs(maxima[i] - maxima[i + 1]), bound)
            )
    return out


def shuffle_stage(l: LengthModel, n: int, prev_level: int = 0, level: int | None = None) -> ShuffleStage:
    """One shuffle stage of a middle-third model.

    ``level`` forces ``m_n``; by default the smallest level giving a
    ``1/4n``-net is used.
    """
    if l.scheme is not Scheme.MIDDLE_THIRD:
        raise DomainError("shuffles are defined on the middle-third scheme")
    if n < 1:
        raise DomainError("stages are numbered from 1")
    if level is None:
        level = net_level(l, n, prev_level)
        if level is None:
            raise ResourceError(
                f"stage {n}: no level in {prev_level + 1}..{l.depth} gives a "
                f"1/{4 * n}-net; refine the model beyond depth {l.depth}"
            )
    elif not prev_level < level <= l.depth:
        raise DomainError(f"stage level {level} must lie in {prev_level + 1}..{l.depth}")

    c = l.cantor
    size = 2 ** (level - prev_level)
    per_block = c.block_size(level, c.depth)
    maxima = l.interval_max[level]
    blocks = c.levels[level]
    sigmas, source = [], []
    for j in range(len(c.levels[prev_level])):
        sigma = interleave_order(maxima[j * size : (j + 1) * size])
        sigmas.append(sigma)
        source.extend(j * size + s for s in sigma)

    offsets = [None] * len(blocks)
    atom_source = []
    for k, s in enumerate(source):
        offsets[s] = blocks[k].lo - blocks[s].lo
        atom_source.extend(range(s * per_block, (s + 1) * per_block))
    model = l.with_values([l.values[t] for t in atom_source])
    displacement = max(abs(o) for o in offsets)
    return ShuffleStage(
        n,
        prev_level,
        level,
        sigmas,
        offsets,
        displacement,
        stage_certificate(model, n, prev_level, level),
        model,
        atom_source,
    )


def stage_map(stage: ShuffleStage, c, x) -> Fraction:
    """The stage's map of the line: a translation on each block, linear
    across the gaps between consecutive blocks."""
    x = Fraction(x)
    blocks = c.levels[stage.level]
    los = [b.lo for b in blocks]
    i = bisect.bisect_right(los, x) - 1
    if i < 0:
        return x + stage.offsets[0]
    if x <= blocks[i].hi:
        return x + stage.offsets[i]
    if i == len(blocks) - 1:
        return x + stage.offsets[i]
    a, b = blocks[i].hi, blocks[i + 1].lo
    fa, fb = a + stage.offsets[i], b + stage.offsets[i + 1]
    return fa + (fb - fa) * (x - a) / (b - a)


@dataclass
class ShuffleRun:
    stages: list
    model: LengthModel
    report: object  # ShcsReport of the final model along the stage levels

    @property
    def levels(self) -> list:
        return [0] + [s.level for s in self.stages]

    @property
    def displacements(self) -> list:
        return [s.displacement for s in self.stages]

    @property
    def bounds(self) -> list:
        return [Fraction(1, 3**s.prev_level) for s in self.stages]

    @property
    def passed(self) -> bool:
        return (
            all(s.certified for s in self.stages)
            and all(d <= b for d, b in zip(self.displacements, self.bounds))
            and self.report.passed
        )

    def to_json(self) -> dict:
        return {
            "levels": self.levels,
            "stages": [s.to_json() for s in self.stages],
            "final_check": {c.name: c.passed for c in self.report.checks},
            "passed": self.passed,
        }


def shuffle_run(l: LengthModel, stages: int) -> ShuffleRun:
    if stages < 1:
        raise DomainError("need at least one stage")
    done, current, prev = [], l, 0
    for n in range(1, stages + 1):
        stage = shuffle_stage(current, n, prev)
        done.append(stage)
        current, prev = stage.model, stage.level
    levels = [0] + [s.level for s in done]
    report = check_shcs_definition(current, levels, schedule=lambda k: Fraction(1, k))
    return ShuffleRun(done, current, report)
