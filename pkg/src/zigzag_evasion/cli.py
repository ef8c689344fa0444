"""Command-line entry point.

Exit codes: 0 on success, 1 when ``decide`` finds no evasion path, 2 on
any error (bad arguments, unreadable or invalid input, failed
preconditions).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import EvasionError, ScenarioValidationError
from .evasion import compute_slices, decide_evasion, slice_nerve
from .geometry import Field, detect_events
from .io import load_scenario
from .oracle import grid_reachability
from .render import render_frames
from .simplicial import betti
from .zigzag import ZigzagAb, ZigzagSets, finite_zigzag_from_json, lim_sets, r1lim_ab, r1lim_finite

DEFAULT_GRID = 64
VERBS = ("events", "nerve", "decide", "report", "oracle", "render", "zigzag")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{message}\n{self.format_usage()}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--field", choices=[f.value for f in Field], default=None,
                        help="coefficient field for homology (default: the scenario's, gf2 if unset)")
    common.add_argument("--grid", type=int, default=None,
                        help=f"cells along the longest domain axis (default: the scenario's hint, else {DEFAULT_GRID})")
    common.add_argument("--dt-scan", type=float, default=1e-3, help="sampling step for event detection")
    common.add_argument("--tol", type=float, default=1e-9, help="margin below which a predicate is MARGINAL")
    common.add_argument("--r1lim", choices=["off", "abelianized", "finite"], default="off")
    common.add_argument("--oracle", action="store_true", help="attach the grid reachability ground truth")

    parser = _Parser(prog="zigzag-evasion", description="Decide evasion paths in mobile sensor networks.")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)
    for verb, text in (("events", "print the nerve event schedule"),
                       ("nerve", "print the nerve and its top homology at each slice"),
                       ("decide", "print the verdict and the size of the limit"),
                       ("report", "write the full report as JSON"),
                       ("oracle", "run the space-time grid search"),
                       ("render", "write one SVG frame per slice")):
        p = sub.add_parser(verb, parents=[common], help=text)
        p.add_argument("scenario", type=Path)
        if verb == "report":
            p.add_argument("-o", "--output", type=Path, default=None, help="output file (default stdout)")
        if verb == "render":
            p.add_argument("-o", "--out-dir", type=Path, default=Path("frames"))
        if verb == "nerve":
            p.add_argument("--time", type=float, default=None, help="a single time instead of all slices")
        if verb == "oracle":
            p.add_argument("--witness", type=Path, default=None, help="write the witness polyline as JSON")
    p = sub.add_parser("zigzag", help="limit or derived limit of a standalone diagram file")
    p.add_argument("diagram", type=Path)
    p.add_argument("--gamma", type=json.loads, default=None, help="base point for finite derived limits (JSON)")
    return parser


def _grid(args, scenario) -> int:
    if args.grid is not None:
        if args.grid < 1:
            raise UsageError("--grid must be positive")
        return args.grid
    return scenario.grid or DEFAULT_GRID


def _fmt_simplices(simplices) -> str:
    return "[" + ", ".join("{" + ",".join(s) + "}" for s in simplices) + "]"


def cmd_events(args, out) -> int:
    sc = load_scenario(args.scenario)
    schedule = detect_events(sc, tol=args.tol, dt_scan=args.dt_scan)
    print(f"events: {len(schedule.events)}", file=out)
    for e in schedule.events:
        print(f"{e.time:.12g} {e.change.value} added={_fmt_simplices(e.added)} removed={_fmt_simplices(e.removed)}",
              file=out)
    print("slices: " + " ".join(f"{t:.12g}" for t in schedule.slice_times), file=out)
    return 0


def cmd_nerve(args, out) -> int:
    sc = load_scenario(args.scenario)
    field = Field(args.field or sc.field)
    times = [args.time] if args.time is not None else detect_events(sc, tol=args.tol, dt_scan=args.dt_scan).slice_times
    k = sc.dimension - 1
    for t in times:
        K = slice_nerve(sc, t, args.tol)
        print(f"t={t:.12g} betti_{k}={betti(K, k, field).betti} maximal={_fmt_simplices(K.maximal_simplices())}",
              file=out)
    return 0


def _decide(args, sc):
    return decide_evasion(sc, resolution=_grid(args, sc), tol=args.tol, dt_scan=args.dt_scan,
                          field=Field(args.field) if args.field else None, r1lim=args.r1lim, oracle=args.oracle)


def cmd_decide(args, out) -> int:
    sc = load_scenario(args.scenario)
    report = _decide(args, sc)
    print(f"{report.verdict.value} lim={report.lim_cardinality}", file=out)
    if report.oracle is not None:
        print(f"oracle {'EXISTS' if report.oracle['exists'] else 'NONE'} "
              f"{'agrees' if report.oracle['agrees'] else 'DISAGREES'}", file=out)
    for r in report.r1lim:
        print(f"r1lim gamma={list(r.gamma)} {r.method.value} {r.invariants}", file=out)
    return 0 if report.lim_cardinality else 1


def cmd_report(args, out) -> int:
    sc = load_scenario(args.scenario)
    text = json.dumps(_decide(args, sc).to_json(), indent=2)
    if args.output is None:
        print(text, file=out)
    else:
        args.output.write_text(text + "\n")
    return 0


def cmd_oracle(args, out) -> int:
    sc = load_scenario(args.scenario)
    cell = float(max(sc.upper - sc.lower)) / _grid(args, sc)
    exists, witness = grid_reachability(sc, cell_size=cell, tol=args.tol)
    print("EXISTS" if exists else "NONE", file=out)
    if witness is not None and args.witness is not None:
        args.witness.write_text(json.dumps(witness))
    return 0


def cmd_render(args, out) -> int:
    sc = load_scenario(args.scenario)
    schedule = detect_events(sc, tol=args.tol, dt_scan=args.dt_scan)
    slices = compute_slices(sc, schedule.slice_times, _grid(args, sc), args.tol)
    frames = render_frames(sc, slices, args.out_dir)
    print(f"wrote {len(frames)} frames to {args.out_dir}", file=out)
    return 0


def cmd_zigzag(args, out) -> int:
    try:
        obj = json.loads(args.diagram.read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioValidationError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    kind = obj.get("type") if isinstance(obj, dict) else None
    try:
        if kind == "sets":
            lim = lim_sets(ZigzagSets.from_json(obj))
            print(f"lim={len(lim)}", file=out)
            for e in lim:
                print(json.dumps(list(e)), file=out)
        elif kind == "abelian":
            print(f"r1lim={r1lim_ab(ZigzagAb.from_json(obj))}", file=out)
        elif kind == "finite":
            res = r1lim_finite(*finite_zigzag_from_json(obj), gamma=args.gamma)
            print(f"r1lim orbits={res.count}", file=out)
        else:
            raise ScenarioValidationError("must be one of 'sets', 'abelian', 'finite'", "type")
    except (KeyError, TypeError) as exc:
        raise ScenarioValidationError(f"malformed diagram: {exc}") from None
    return 0


COMMANDS = {"events": cmd_events, "nerve": cmd_nerve, "decide": cmd_decide, "report": cmd_report,
            "oracle": cmd_oracle, "render": cmd_render, "zigzag": cmd_zigzag}


def main(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.verb](args, out)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
    except ScenarioValidationError as exc:
        where = f" (field {exc.field})" if exc.field else ""
        print(f"invalid input{where}: {exc}", file=sys.stderr)
    except EvasionError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
    except OSError as exc:
        print(f"cannot read input: {exc}", file=sys.stderr)
    return 2


if __name__ == "__main__":
    sys.exit(main())
