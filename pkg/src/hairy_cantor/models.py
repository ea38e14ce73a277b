"""Seeded test models: perturbations of a given model and random cascades."""

from __future__ import annotations

import random
from fractions import Fraction

from .cantor import Scheme, build_cantor
from .errors import DomainError
from .hair import LengthModel


def random_rational(rng: random.Random, lo: Fraction, hi: Fraction, den: int = 1000) -> Fraction:
    a, b = int(lo * den), int(hi * den)
    return Fraction(rng.randint(a, b), den)


def perturbed_model(
    base: LengthModel,
    seed: int,
    level: int = 2,
    lo: Fraction = Fraction(9, 10),
    hi: Fraction = Fraction(11, 10),
) -> LengthModel:
    """Multiply ``base`` by one seeded factor in ``[lo, hi]`` per level-``level``
    interval."""
    if not 0 <= level <= base.depth:
        raise DomainError(f"perturbation level {level} outside 0..{base.depth}")
    rng = random.Random(seed)
    c = base.cantor
    factors = [random_rational(rng, lo, hi) for _ in c.levels[level]]
    size = c.block_size(level, c.depth)
    return base.with_values([v * factors[i // size] for i, v in enumerate(base.values)])


def tilted_model(
    base: LengthModel,
    seed: int,
    lo: Fraction = Fraction(9, 10),
    hi: Fraction = Fraction(11, 10),
) -> LengthModel:
    """Multiply ``base`` by ``a + (b - a) x`` at each atom midpoint ``x``, with
    seeded ``a, b`` in ``[lo, hi]``.  The factor changes slowly enough for the
    ratio windows of every nest level to be reachable."""
    rng = random.Random(seed)
    a, b = random_rational(rng, lo, hi), random_rational(rng, lo, hi)
    return base.with_values(
        [v * (a + (b - a) * atom.midpoint) for v, atom in zip(base.values, base.cantor.atoms)]
    )


def cascade_model(
    depth: int,
    seed: int,
    scheme: Scheme = Scheme.MIDDLE_THIRD,
    lo: Fraction = Fraction(1, 10),
    hi: Fraction = Fraction(3, 4),
) -> LengthModel:
    """Random multiplicative cascade with maximum 1.

    Every parent passes factor 1 to one child and a seeded factor in
    ``[lo, hi]`` to each other child, so each interval at each level holds a
    spread of sub-maxima.  All values are positive.
    """
    rng = random.Random(seed)
    c = build_cantor(scheme, depth)
    values = [Fraction(1)]
    for k in range(1, depth + 1):
        b = scheme.branching(k)
        nxt = []
        for v in values:
            keep = rng.randrange(b)
            nxt.extend(
                v if i == keep else v * random_rational(rng, lo, hi) for i in range(b)
            )
        values = nxt
    return LengthModel(c, tuple(values))


def spread_values(r: int) -> list:
    """``2^r`` values: ``1``, then evenly spaced down to ``1/(2^r - 1)``, then
    one small value ``1/2^(r+2)``."""
    size = 2**r
    return [Fraction(k, size - 1) for k in range(size - 1, 0, -1)] + [Fraction(1, 2 ** (r + 2))]


def stratified_model(strata=(2, 3, 3), seed: int = 0, jitter: Fraction = Fraction(1, 100)) -> LengthModel:
    """Middle-third model whose maxima are spread evenly inside every stratum.

    The depth is ``sum(strata)``.  Within each block at a stratum boundary the
    sub-block maxima, relative to the block maximum, are a seeded permutation
    of :func:`spread_values` with every value but the top one moved by at most
    ``jitter``.
    """
    rng = random.Random(seed)
    depth = sum(strata)
    c = build_cantor(Scheme.MIDDLE_THIRD, depth)
    values = [Fraction(1)]
    for r in strata:
        base = spread_values(r)
        nxt = []
        for v in values:
            rel = [base[0]] + [
                b + random_rational(rng, -jitter, jitter, den=10000) for b in base[1:]
            ]
            rng.shuffle(rel)
            nxt.extend(v * f for f in rel)
        values = nxt
    return LengthModel(c, tuple(values))
