"""Command-line front end.

Exit codes: 0 decided or success, 1 usage or input error, 2 Unknown verdict,
3 verification disagreement.  Lines starting with ``::`` are meant for
scripts; everything else is for people.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional, Sequence, TextIO

from .core import Configuration, ContractError, GameInstance, Player, Semantics
from .fixpoint import FixpointParams, decide_nbvass_zero, default_params, dump_table
from .harness import DEADLOCK_NOTE, PROFILES, transform, verify_reduction
from .io import OBJECTIVE_KINDS, GenParams, InstanceError, ParseError, generate, parse, serialize
from .oracle import (
    RegionResult,
    Verdict,
    Window,
    certain_region,
    extract_strategy,
    simulate,
)
from .reductions import REDUCTIONS, VARIANTS

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_UNKNOWN = 2
EXIT_DISAGREE = 3

WINNER = {Verdict.WIN: "reacher", Verdict.LOSE: "opponent", Verdict.UNKNOWN: "unknown"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse exits with 2 by default
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _window(text: Optional[str]) -> Optional[Window]:
    if text is None:
        return None
    try:
        return Window.parse(text)
    except (ValueError, ContractError) as exc:
        raise UsageError(f"bad --window {text!r}: {exc}") from None


def _load(path: str) -> GameInstance:
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return parse(text)


def _emit(text: str, out: Optional[str], stdout: TextIO) -> None:
    if out is None:
        stdout.write(text)
    else:
        Path(out).write_text(text)


def _verdict_exit(v: Verdict) -> int:
    return EXIT_UNKNOWN if v is Verdict.UNKNOWN else EXIT_OK


def _fmt_config(game: GameInstance, c: Configuration) -> str:
    return " ".join([game.system.name(c.location), *map(str, c.counters)])


def region_lines(region: RegionResult) -> List[str]:
    """``config <loc> <x...> win|lose|unknown``, in location order then
    counters."""
    game = region.game
    return [
        f"config {_fmt_config(game, c)} {region.verdicts[c].value}"
        for c in sorted(region.verdicts, key=lambda c: (c.location, c.counters))
    ]


# -- subcommands ---------------------------------------------------------------


def cmd_solve(args: argparse.Namespace, stdout: TextIO) -> int:
    game = _load(args.input)
    region = certain_region(game, _window(args.window))
    v = region.at_initial()
    print(f"# {DEADLOCK_NOTE}", file=stdout)
    print(f"window: {region.window}", file=stdout)
    print(f"initial: {_fmt_config(game, game.initial)}", file=stdout)
    for verdict in Verdict:
        print(f"{verdict.value}: {region.count(verdict)}", file=stdout)
    print(f"winner: {WINNER[v]}", file=stdout)
    print(f":: window {region.window}", file=stdout)
    print(f":: verdict {v.value}", file=stdout)
    return _verdict_exit(v)


def cmd_region_dump(args: argparse.Namespace, stdout: TextIO) -> int:
    game = _load(args.input)
    region = certain_region(game, _window(args.window))
    _emit("".join(line + "\n" for line in region_lines(region)), args.out, stdout)
    return EXIT_OK


def _params(args: argparse.Namespace, game: GameInstance) -> Optional[FixpointParams]:
    if args.cap is None and args.max_rounds is None:
        return None
    base = default_params(game.system, game.initial.counters[0])
    cap = base.cap if args.cap is None else args.cap
    rounds = game.system.num_locations * (cap + 2) if args.max_rounds is None else args.max_rounds
    if cap < 0 or rounds < 1:
        raise UsageError("--cap must be >= 0 and --max-rounds >= 1")
    return replace(base, cap=cap, max_rounds=rounds)


def cmd_decide_nb0(args: argparse.Namespace, stdout: TextIO) -> int:
    game = _load(args.input)
    decision = decide_nbvass_zero(game, _params(args, game))
    system = game.system
    qz = decision.qz
    if qz is not None:
        print(f"Q_Z: {' '.join(system.name(q) for q in sorted(qz.members))}", file=stdout)
        if qz.unknown:
            print(f"Q_Z undecided: {' '.join(system.name(q) for q in sorted(qz.unknown))}", file=stdout)
    for d in decision.diagnostics:
        print(f"# {d}", file=stdout)
    res = decision.result
    if res is not None:
        stdout.write(dump_table(system, res.table))
        print(f"status: {res.status.value} after {res.rounds} rounds", file=stdout)
        print(f"total rounds including Q_Z: {decision.rounds}", file=stdout)
    print(f"winner: {WINNER[decision.verdict]}", file=stdout)
    print(f":: verdict {decision.verdict.value}", file=stdout)
    if decision.certificate:
        print(f":: certificate {decision.certificate}", file=stdout)
    if res is not None:
        print(f":: rounds {decision.rounds}", file=stdout)
    return _verdict_exit(decision.verdict)


def cmd_transform(args: argparse.Namespace, stdout: TextIO) -> int:
    game = _load(args.input)
    out = transform(args.reduction, game, args.variant)
    notes = [f"{args.reduction} variant={args.variant}", *out.notes]
    _emit(serialize(out.game, notes), args.out, stdout)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, stdout: TextIO) -> int:
    if args.trials < 0:
        raise UsageError("--trials must be >= 0")
    windows = None
    if args.window is not None or args.target_window is not None:
        if args.window is None or args.target_window is None:
            raise UsageError("--window and --target-window must be given together")
        windows = (_window(args.window), _window(args.target_window))
    params = None
    if args.locations is not None:
        params = replace(PROFILES[args.reduction].params, num_locations=args.locations)
        if args.dim is not None:
            params = replace(params, dimension=args.dim)
    elif args.dim is not None:
        params = replace(PROFILES[args.reduction].params, dimension=args.dim)
    max_locations = PROFILES[args.reduction].max_locations if args.locations is None else args.locations
    instances = [_load(p) for p in args.input]
    report = verify_reduction(
        args.reduction,
        params,
        trials=args.trials,
        windows=windows,
        seed=args.seed,
        variant=args.variant,
        instances=instances,
        max_locations=max_locations,
    )
    _emit(report.render(), args.out, stdout)
    return EXIT_OK if report.passed else EXIT_DISAGREE


def cmd_gen(args: argparse.Namespace, stdout: TextIO) -> int:
    try:
        params = GenParams(
            num_locations=args.locations,
            dimension=args.dim,
            label_bound=args.label_bound,
            semantics=Semantics(args.semantics),
            objective_kind=args.objective_kind,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit(serialize(generate(params, args.seed)), args.out, stdout)
    return EXIT_OK


def _start(game: GameInstance, text: Optional[str]) -> Configuration:
    if text is None:
        return game.initial
    toks = text.split()
    try:
        q = game.system.index(toks[0])
        vec = tuple(int(t) for t in toks[1:])
    except (IndexError, KeyError, ValueError):
        raise UsageError(f"bad --start {text!r}, expected '<loc> <x...>'") from None
    if len(vec) != game.dimension:
        raise UsageError(f"--start needs {game.dimension} counter value(s)")
    return Configuration(q, vec)


def cmd_simulate(args: argparse.Namespace, stdout: TextIO) -> int:
    game = _load(args.input)
    start = _start(game, args.start)
    region = certain_region(game, _window(args.window))
    reacher = extract_strategy(game, region, Player.REACHER)
    opponent = extract_strategy(game, region, Player.OPPONENT)
    play = simulate(game, reacher, opponent, start, args.max_steps, args.seed)
    for i, c in enumerate(play.configs):
        print(f"step {i} {_fmt_config(game, c)}", file=stdout)
    status = play.status.value
    if play.loser is not None:
        status += f" {'reacher' if play.loser is Player.REACHER else 'opponent'}"
    print(f"status: {status}", file=stdout)
    print(f":: steps {len(play) - 1}", file=stdout)
    print(f":: status {status}", file=stdout)
    return EXIT_OK


# -- argument parsing -----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="crgames", description="Counter reachability games.")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_input(p: argparse.ArgumentParser) -> None:
        p.add_argument("--in", dest="input", required=True, metavar="FILE", help="crg-v1 file, '-' for stdin")

    p = sub.add_parser("solve", help="oracle verdict at the initial configuration")
    with_input(p)
    p.add_argument("--window", help="lo:hi[,lo:hi...]")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("region-dump", help="certain verdict of every in-window configuration")
    with_input(p)
    p.add_argument("--window")
    p.add_argument("--out")
    p.set_defaults(func=cmd_region_dump)

    p = sub.add_parser("decide-nb0", help="fixpoint decision for a non-blocking zero objective")
    with_input(p)
    p.add_argument("--cap", type=int)
    p.add_argument("--max-rounds", type=int)
    p.set_defaults(func=cmd_decide_nb0)

    p = sub.add_parser("transform", help="apply a reduction and print the result")
    p.add_argument("reduction", choices=sorted(REDUCTIONS))
    with_input(p)
    p.add_argument("--variant", choices=VARIANTS, default=VARIANTS[0])
    p.add_argument("--out")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("verify", help="randomised equivalence check of a reduction")
    p.add_argument("reduction", choices=sorted(REDUCTIONS))
    p.add_argument("--in", dest="input", action="append", default=[], metavar="FILE",
                   help="extra source instance (repeatable)")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--variant", choices=VARIANTS, default=VARIANTS[0])
    p.add_argument("--window", help="source window")
    p.add_argument("--target-window")
    p.add_argument("--locations", type=int, help="maximum number of source locations")
    p.add_argument("--dim", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="generate a random instance")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--locations", type=int, default=3)
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--label-bound", type=int, default=1)
    p.add_argument("--semantics", choices=[s.value for s in Semantics], default=Semantics.Z.value)
    p.add_argument("--objective-kind", choices=OBJECTIVE_KINDS, default="single")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("simulate", help="play extracted strategies from a configuration")
    with_input(p)
    p.add_argument("--window")
    p.add_argument("--start", help="'<loc> <x...>', default the initial configuration")
    p.add_argument("--max-steps", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_simulate)
    return parser


def run(argv: Optional[Sequence[str]] = None, stdout: Optional[TextIO] = None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args, stdout)
    except ParseError as exc:
        print(f"{args.input}:{exc.line}:{exc.column}: {exc.message}", file=sys.stderr)
    except InstanceError as exc:
        for d in exc.diagnostics:
            print(f"invalid instance: {d}", file=sys.stderr)
    except (UsageError, ContractError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_USAGE


def main() -> None:
    sys.exit(run())


__all__ = ["build_parser", "main", "region_lines", "run"]
