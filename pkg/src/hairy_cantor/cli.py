"""Command-line entry point.

Exit status: 0 on success, 1 when a check or construction fails, 2 on a usage
or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .cantor import Layout, frac_to_str, index_address
from .errors import HairyCantorError, MatchingError, ResourceError
from .hair import (
    LengthModel,
    canonical_model,
    check_shcs_definition,
    check_usc_limit,
    peak_density_stats,
)
from .homeo import shuffle_run
from .matching import build_matched_nests
from .models import cascade_model, perturbed_model, stratified_model, tilted_model
from .render import RenderSpec, export_heights, render_figure

OK, FAILED, USAGE = 0, 1, 2


def _load_model(path: str) -> LengthModel:
    with open(path) as fh:
        return LengthModel.from_json(json.load(fh))


def _write_json(path: str, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=1) + "\n")


def cmd_example(args) -> int:
    if args.kind == "canonical":
        model = canonical_model(args.depth)
    elif args.kind == "stratified":
        model = stratified_model(seed=args.seed)
    else:
        model = cascade_model(args.depth, args.seed)
    out = Path(args.out)
    if out.suffix == ".svg":
        graphs = tuple(range(1, min(args.depth, 4) + 1))
        spec = RenderSpec(depth=args.depth, graph_depths=graphs, layout=Layout(args.layout))
        out.write_text(render_figure(model, spec))
    elif out.suffix == ".csv":
        out.write_text(export_heights(model))
    elif out.suffix == ".json":
        _write_json(args.out, model.to_json())
    else:
        print(f"error: unsupported output type {out.suffix!r}", file=sys.stderr)
        return USAGE
    print(f"wrote {out}")
    return OK


def cmd_heights(args) -> int:
    model = _load_model(args.input) if args.input else canonical_model(args.depth)
    depth = model.depth if args.depth is None else args.depth
    Path(args.out).write_text(export_heights(model, depth))
    print(f"wrote {args.out}")
    return OK


def cmd_perturb(args) -> int:
    base = _load_model(args.input)
    if args.mode == "tilt":
        model = tilted_model(base, args.seed)
    else:
        model = perturbed_model(base, args.seed, args.level)
    _write_json(args.out, model.to_json())
    print(f"wrote {args.out}")
    return OK


def cmd_match(args) -> int:
    pair = build_matched_nests(_load_model(args.x), _load_model(args.y), args.levels)
    _write_json(args.out, pair.to_json())
    ratios = [r for level in pair.ratios[1:] for r in level]
    print(f"levels: {pair.levels}, blocks: {[len(b) for b in pair.x_blocks]}")
    print(f"ratios equal to 1: {sum(r == 1 for r in ratios)} of {len(ratios)}")
    return OK


def cmd_uniformize(args) -> int:
    run = shuffle_run(_load_model(args.input), args.stages)
    if args.certificate:
        _write_json(args.certificate, run.to_json())
    if args.out:
        _write_json(args.out, run.model.to_json())
    for s in run.stages:
        print(
            f"stage {s.n}: m = {s.level}, displacement {s.displacement} "
            f"(bound {Fraction(1, 3 ** s.prev_level)}), certified {s.certified}"
        )
    print("passed" if run.passed else "FAILED")
    return OK if run.passed else FAILED


def cmd_check(args) -> int:
    model = _load_model(args.input)
    schedule = (lambda k: Fraction(1, k)) if args.schedule == "harmonic" else None
    report = check_shcs_definition(model, schedule=schedule)
    failed = False
    for c in report.checks:
        print(f"{c.name}: {'pass' if c.passed else 'FAIL'}" + (f" ({c.witness})" if c.witness else ""))
        failed |= not c.passed
    bad_usc = next(
        (
            r
            for r in (
                check_usc_limit(model, index_address(model.scheme, model.depth, i))
                for i in range(len(model.values))
            )
            if not r.passed
        ),
        None,
    )
    if bad_usc:
        print(f"usc_limit: FAIL (address {bad_usc.address}, level {bad_usc.first_offending_level})")
        failed = True
    else:
        print("usc_limit: pass")
    stats = peak_density_stats(model)
    print(f"peak_density: sup {frac_to_str(stats.sup)}, largest height gap {frac_to_str(stats.max_gap)}")
    return FAILED if failed else OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hairy-cantor", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("example", help="example model as SVG, CSV or JSON")
    s.add_argument("--depth", type=int, default=4)
    s.add_argument("--out", required=True)
    s.add_argument("--layout", choices=[m.value for m in Layout], default=Layout.TRUE_CANTOR.value)
    s.add_argument(
        "--kind",
        choices=["canonical", "stratified", "cascade"],
        default="canonical",
        help="stratified and cascade are seeded middle-third models",
    )
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_example)

    s = sub.add_parser("heights", help="height table as CSV")
    s.add_argument("--depth", type=int)
    s.add_argument("--in", dest="input", help="hair-set JSON (default: canonical model)")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_heights)

    s = sub.add_parser("perturb", help="seeded perturbation by factors in [0.9, 1.1]")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--mode", choices=["tilt", "blocks"], default="tilt")
    s.add_argument("--level", type=int, default=2, help="block level for --mode blocks")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_perturb)

    s = sub.add_parser("match", help="matched partition nests for two models")
    s.add_argument("--x", required=True)
    s.add_argument("--y", required=True)
    s.add_argument("--levels", type=int, required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_match)

    s = sub.add_parser("uniformize", help="shuffle a middle-third model into shape")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--stages", type=int, required=True)
    s.add_argument("--certificate")
    s.add_argument("--out")
    s.set_defaults(func=cmd_uniformize)

    s = sub.add_parser("check", help="finite-depth checks of a hair-set JSON")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--schedule", choices=["calibrated", "harmonic"], default="calibrated")
    s.set_defaults(func=cmd_check)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    try:
        return args.func(args)
    except (MatchingError, ResourceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return FAILED
    except (HairyCantorError, OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
