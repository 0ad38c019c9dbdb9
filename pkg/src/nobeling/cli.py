"""Command-line entry point.

Subcommands::

    run         play the game on seeded samples, write a certificate
    lines       print the first k lines of the enumeration as JSON lines
    move-eval   apply a serialized move to JSON-lines points
    codim       classify a voxel file over a window family
    constant-c  exact partial product of (1 - 2^-m)

Exit status: 0 on success, 2 on configuration errors, 1 on runtime errors.
"""

from __future__ import annotations

import argparse
import csv
import decimal
import json
import sys
from fractions import Fraction

from . import codim, game, lines
from .fixtures import game_samples
from .geometry import line_to_json, point_from_json, point_to_json, scalar_from_json, scalar_to_json
from .moves import DomainError, InfeasibleError, move_from_json


class ConfigError(Exception):
    pass


def positive_rational(text: str) -> Fraction:
    try:
        q = scalar_from_json(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    if q <= 0:
        raise argparse.ArgumentTypeError(f"{text!r} is not a positive rational")
    return q


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _write(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def render_decimal(q: Fraction, precision: int) -> str:
    ctx = decimal.Context(prec=precision)
    return str(ctx.divide(decimal.Decimal(q.numerator), decimal.Decimal(q.denominator)))


def write_trajectory(state: game.EmbeddingState, path: str, precision: int) -> None:
    n = len(state.domain[0])
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# lossy: decimal rendering at {precision} significant digits; the certificate holds exact values\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["round", "sample_id"] + [f"coord_{j}" for j in range(n)])
        for k, images in enumerate(state.trajectory):
            for sid, p in enumerate(images):
                w.writerow([k, sid] + [render_decimal(c, precision) for c in p])


# --- subcommands --------------------------------------------------------------


def cmd_run(args) -> int:
    if args.dim < 4:
        raise ConfigError("run needs --dim >= 4 (the straightening move assumes n > 3)")
    if args.samples < 1:
        raise ConfigError("--samples must be at least 1")
    samples = game_samples(args.seed, args.dim, args.samples, args.rounds, args.height)
    try:
        cfg = game.RunConfig(
            dim=args.dim,
            samples=tuple(samples),
            global_eps=args.eps,
            rounds=args.rounds,
            clearance_fraction=args.clearance_fraction,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    state, cert = game.run(cfg)
    out = cert.to_json()
    out["dim"] = args.dim
    out["seed"] = args.seed
    out["samples"] = [point_to_json(p) for p in state.domain]
    out["images"] = [point_to_json(p) for p in state.images]
    out["lines"] = [{"index": r.line_index, **line_to_json(r.line)} for r in state.history]
    _write(_dump(out), args.certificate)
    if args.trajectory:
        write_trajectory(state, args.trajectory, args.precision)
    return 0


def cmd_lines(args) -> int:
    if args.dim < 2:
        raise ConfigError("--dim must be at least 2")
    if args.count < 0 or args.start < 0:
        raise ConfigError("--count and --start must be non-negative")
    rows = []
    for i in range(args.start, args.start + args.count):
        rows.append(json.dumps({"index": i, **line_to_json(lines.nth_line(args.dim, i))}))
    _write("".join(r + "\n" for r in rows), args.output)
    return 0


def cmd_move_eval(args) -> int:
    try:
        with open(args.move, encoding="utf-8") as fh:
            move = move_from_json(json.load(fh))
    except (OSError, ValueError, KeyError) as exc:
        raise ConfigError(f"cannot load move {args.move}: {exc}") from None
    src = sys.stdin if args.points in (None, "-") else open(args.points, encoding="utf-8")
    out = []
    with src:
        for ln in src:
            if not ln.strip():
                continue
            p = point_from_json(json.loads(ln))
            q = move.inverse(p) if args.inverse else move.forward(p)
            out.append(json.dumps(point_to_json(q)))
    _write("".join(r + "\n" for r in out), args.output)
    return 0


def cmd_codim(args) -> int:
    try:
        v = codim.read_voxels(args.input)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read {args.input}: {exc}") from None
    windows = codim.WINDOW_FAMILIES[args.windows](v.dim, v.resolution)
    report = codim.classify(v, windows)
    _write(_dump(report.to_json()), args.output)
    return 0


def cmd_constant_c(args) -> int:
    if args.terms < 1:
        raise ConfigError("--terms must be at least 1")
    q = game.constant_C(args.terms)
    print(str(q) if not args.decimal else render_decimal(q, args.decimal))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nobeling", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="play the perturbation game and certify it")
    r.add_argument("--dim", type=int, default=4)
    r.add_argument("--rounds", type=int, default=3)
    r.add_argument("--eps", type=positive_rational, default=Fraction(1, 10), help="global eps as num/den")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--samples", type=int, default=6, help="number of seeded samples")
    r.add_argument("--height", type=int, default=8, help="height bound of sample coordinates")
    r.add_argument("--clearance-fraction", type=positive_rational, default=Fraction(1, 4))
    r.add_argument("--certificate", default=None, help="certificate JSON path (default stdout)")
    r.add_argument("--trajectory", default=None, help="optional per-round CSV path")
    r.add_argument("--precision", type=int, default=12)
    r.set_defaults(func=cmd_run)

    ln = sub.add_parser("lines", help="first k lines of the enumeration")
    ln.add_argument("--dim", type=int, required=True)
    ln.add_argument("--count", type=int, required=True)
    ln.add_argument("--start", type=int, default=0)
    ln.add_argument("--output", default=None)
    ln.set_defaults(func=cmd_lines)

    def add_eval_args(m):
        m.add_argument("--move", required=True, help="serialized move JSON")
        m.add_argument("--points", default=None, help="JSON-lines points (default stdin)")
        m.add_argument("--inverse", action="store_true")
        m.add_argument("--output", default=None)
        m.set_defaults(func=cmd_move_eval)

    add_eval_args(sub.add_parser("move-eval", help="apply a serialized move"))
    mv = sub.add_parser("move", help="move utilities")
    mv_sub = mv.add_subparsers(dest="action", required=True)
    add_eval_args(mv_sub.add_parser("eval", help="apply a serialized move"))

    c = sub.add_parser("codim", help="voxel codimension evidence")
    c.add_argument("--input", required=True)
    c.add_argument("--windows", choices=sorted(codim.WINDOW_FAMILIES), default="octants")
    c.add_argument("--output", default=None)
    c.set_defaults(func=cmd_codim)

    k = sub.add_parser("constant-c", help="partial product of (1 - 2^-m)")
    k.add_argument("--terms", type=int, required=True)
    k.add_argument("--decimal", type=int, default=0, help="print this many significant digits instead")
    k.set_defaults(func=cmd_constant_c)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"nobeling {args.command}: {exc}", file=sys.stderr)
        return 2
    except (InfeasibleError, DomainError, game.RuleViolation, ArithmeticError, OSError, ValueError) as exc:
        print(f"nobeling {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
