"""SVG drawing of the canonical example and CSV height tables."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction

from .cantor import Layout, Scheme, build_cantor, frac_to_str, index_address, layout_levels, parse_frac
from .errors import ContractError, DomainError
from .hair import LengthModel, canonical_graph

GRAPH_COLORS = ("blue", "brown", "red", "green")
CSV_HEADER = ["address", "x_lo", "x_hi", "height", "height_exact"]


def six_decimals(q) -> str:
    """``q`` rounded half-to-even to 6 decimals."""
    n = round(Fraction(q) * 10**6)
    sign = "-" if n < 0 else ""
    whole, frac = divmod(abs(n), 10**6)
    return f"{sign}{whole}.{frac:06d}"


@dataclass(frozen=True)
class RenderSpec:
    depth: int = 4
    graph_depths: tuple = (1, 2, 3, 4)
    colors: tuple = GRAPH_COLORS
    layout: Layout = Layout.TRUE_CANTOR
    width: int = 800
    height: int = 400
    margin: int = 20

    def __post_init__(self):
        if any(not 1 <= g <= self.depth for g in self.graph_depths):
            raise DomainError(f"graph depths must lie in 1..{self.depth}")
        if len(self.colors) < len(self.graph_depths):
            raise DomainError("need one colour per graph")


def _coord(v: float) -> str:
    return f"{v:.4f}"


def render_figure(l: LengthModel, spec: RenderSpec = RenderSpec()) -> str:
    """One black segment per level-``depth`` interval, from the axis up to its
    maximum, with the graphs of ``l_n`` for the requested ``n`` on top."""
    if l.scheme is not Scheme.CANONICAL:
        raise ContractError("the figure is drawn for the canonical model")
    if spec.depth > l.depth:
        raise DomainError(f"model depth {l.depth} is below the figure depth {spec.depth}")
    w, h, m = spec.width, spec.height, spec.margin

    def sx(x) -> str:
        return _coord(m + float(x) * w)

    def sy(y) -> str:
        return _coord(m + (1 - float(y)) * h)

    intervals = layout_levels(build_cantor(Scheme.CANONICAL, spec.depth), spec.layout)[spec.depth]
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{w + 2 * m}" height="{h + 2 * m}" viewBox="0 0 {w + 2 * m} {h + 2 * m}">',
        f'<line x1="{sx(0)}" y1="{sy(0)}" x2="{sx(1)}" y2="{sy(0)}" stroke="gray" stroke-width="0.5"/>',
        '<g id="hairs" stroke="black" stroke-width="0.6">',
    ]
    for iv, v in zip(intervals, l.interval_max[spec.depth]):
        x = sx(iv.midpoint)
        lines.append(f'<line x1="{x}" y1="{sy(0)}" x2="{x}" y2="{sy(v)}"/>')
    lines.append("</g>")
    for n, color in zip(spec.graph_depths, spec.colors):
        pts = " ".join(f"{sx(x)},{sy(y)}" for x, y in canonical_graph(n, spec.layout).knots)
        lines.append(
            f'<polyline id="l{n}" fill="none" stroke="{color}" stroke-width="1" points="{pts}"/>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def _address_str(address) -> str:
    return ".".join(map(str, address))


def export_heights(l: LengthModel, depth: int | None = None) -> str:
    depth = l.depth if depth is None else depth
    if not 0 <= depth <= l.depth:
        raise DomainError(f"depth {depth} outside 0..{l.depth}")
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for i, (iv, v) in enumerate(zip(l.cantor.levels[depth], l.interval_max[depth])):
        writer.writerow(
            [
                _address_str(index_address(l.scheme, depth, i)),
                frac_to_str(iv.lo),
                frac_to_str(iv.hi),
                six_decimals(v),
                frac_to_str(v),
            ]
        )
    return out.getvalue()


def import_heights(text: str) -> LengthModel:
    """Rebuild the model from a full-depth height table.

    The scheme is whichever construction reproduces the listed intervals.
    """
    rows = list(csv.DictReader(io.StringIO(text)))
    if not rows or list(rows[0].keys()) != CSV_HEADER:
        raise ContractError(f"expected header {','.join(CSV_HEADER)}")
    depth = len(rows[0]["address"].split(".")) if rows[0]["address"] else 0
    listed = [(parse_frac(r["x_lo"]), parse_frac(r["x_hi"])) for r in rows]
    for scheme in Scheme:
        try:
            c = build_cantor(scheme, depth)
        except Exception:
            continue
        if [(a.lo, a.hi) for a in c.atoms] == listed:
            model = LengthModel(c, tuple(parse_frac(r["height_exact"]) for r in rows))
            for r, v in zip(rows, model.values):
                if six_decimals(v) != r["height"]:
                    raise ContractError(f"row {r['address']}: rounded and exact heights disagree")
            return model
    raise ContractError("rows do not list the atoms of a known construction")
