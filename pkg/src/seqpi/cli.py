"""Command-line front end: ``seqpi <command> ...``.

Exit status is 0 on success, 1 when a check fails and 2 on parse or flag
errors. Reports go to standard output, diagnostics to standard error.
Standard input is read only for ``--file -`` and ``--interactive``.
"""

from __future__ import annotations

import argparse
import sys
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import TextIO

from . import __version__
from .acceptance import REPL_BUDGET, SEARCH_DEPTH, SIM_DEPTH, SIM_ROUNDS, run_all
from .corpus import read_entries, render_generated, seed_from_env
from .encode import (
    LamSyntaxError,
    LamUntypeable,
    derivation_lam,
    encode_lam_to_pi,
    encode_lam_to_x,
    encode_x,
    infer_lam,
    lam_free_vars,
    parse_lam,
    pretty_lam_typing,
    print_lam,
)
from .pirewrite import find_simulating, pi_step_tagged
from .pisyntax import PiSyntaxError, cnf, free_names, parse_pi, print_pi
from .pitypes import explain_pi, format_pi_context, parse_pi_context
from .simpletypes import TypeSyntaxError, print_type
from .xrewrite import Redex, RedexMismatch, Strategy, XRule, apply_redex, find_redexes, format_path, parse_path
from .xsyntax import FreshSupply, XSyntaxError, all_names as x_names, free_plugs, free_sockets, parse_xnet, print_xnet
from .xtypes import Untypeable, derivation_x, explain_x, parse_context, principal_x

CORPUS_FILES = {
    "x": ("intro.txt", "peirce.txt", "rules.txt", "generated.txt"),
    "lam": ("lambda.txt", "lambda_generated.txt"),
    "pi": (),
}


class UsageError(Exception):
    """Bad flags or unparsable input (exit 2)."""


class CheckFailed(Exception):
    """A type check or simulation check did not hold (exit 1)."""


@dataclass
class IO:
    out: TextIO
    err: TextIO
    inp: TextIO

    def say(self, line: str = "") -> None:
        self.out.write(line + "\n")


# --------------------------------------------------------------------------
# input


def _read_source(args: argparse.Namespace, io: IO) -> str:
    given = [s for s in (args.term, args.file, args.entry) if s is not None]
    if len(given) != 1:
        raise UsageError("give exactly one of TERM, --file or --entry")
    if args.term is not None:
        return args.term
    if args.file is not None:
        if args.file == "-":
            return io.inp.read()
        try:
            return Path(args.file).read_text(encoding="utf-8")
        except OSError as e:
            raise UsageError(f"cannot read {args.file}: {e.strerror}") from None
    calc = getattr(args, "calc", None) or getattr(args, "source_calc", None)
    for filename in CORPUS_FILES[calc]:
        for e in read_entries(filename):
            if e.name == args.entry:
                return e.text
    raise UsageError(f"no bundled {calc} entry named {args.entry!r}")


def _strip_comments(text: str) -> str:
    return "\n".join(line for line in text.splitlines() if not line.strip().startswith("--"))


def _parse(calc: str, text: str, allow_active: bool = False):
    text = _strip_comments(text)
    try:
        match calc:
            case "x":
                return parse_xnet(text, allow_active=allow_active)
            case "pi":
                return parse_pi(text)
            case "lam":
                return parse_lam(text)
    except (XSyntaxError, PiSyntaxError, LamSyntaxError) as e:
        raise UsageError(f"parse error: {e}") from None
    raise UsageError(f"unknown calculus {calc!r}")


def _read_ctx(path: str, calc: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None
    try:
        return parse_pi_context(text) if calc == "pi" else parse_context(text)
    except TypeSyntaxError as e:
        raise UsageError(f"{path}: {e}") from None


def _print_term(calc: str, term) -> str:
    return {"x": print_xnet, "pi": print_pi, "lam": print_lam}[calc](term)


# --------------------------------------------------------------------------
# check / typecheck


def cmd_check(args: argparse.Namespace, io: IO) -> None:
    term = _parse(args.calc, _read_source(args, io), allow_active=True)
    io.say(_print_term(args.calc, term))
    match args.calc:
        case "x":
            io.say(f"free sockets: {' '.join(sorted(free_sockets(term))) or '-'}")
            io.say(f"free plugs: {' '.join(sorted(free_plugs(term))) or '-'}")
        case "pi":
            io.say(f"free names: {' '.join(sorted(free_names(term))) or '-'}")
        case "lam":
            io.say(f"free variables: {' '.join(sorted(lam_free_vars(term))) or '-'}")
    if args.ctx:
        _typecheck(args, term, io)


def cmd_typecheck(args: argparse.Namespace, io: IO) -> None:
    term = _parse(args.calc, _read_source(args, io), allow_active=True)
    _typecheck(args, term, io)


def _typecheck(args: argparse.Namespace, term, io: IO) -> None:
    match args.calc:
        case "x":
            if args.ctx:
                ctx = _read_ctx(args.ctx, "x")
                reason = explain_x(term, ctx)
                if reason:
                    raise CheckFailed(reason)
                io.say(str(ctx))
            else:
                try:
                    io.say(str(principal_x(term)))
                except Untypeable as e:
                    raise CheckFailed(f"untypeable: {e}") from None
            if args.explain:
                io.say()
                for line in derivation_x(term):
                    io.say(line)
        case "pi":
            if not args.ctx:
                raise UsageError("typecheck --calc pi needs --ctx FILE")
            ctx = _read_ctx(args.ctx, "pi")
            reason = explain_pi(term, ctx)
            if reason:
                raise CheckFailed(reason)
            io.say(str(ctx))
            if args.explain:
                io.say()
                io.out.write(format_pi_context(ctx))
        case "lam":
            if args.ctx:
                raise UsageError("--ctx is not supported for lam; the principal typing is printed")
            try:
                gamma, ty = pretty_lam_typing(*infer_lam(term))
            except LamUntypeable as e:
                raise CheckFailed(f"untypeable: {e}") from None
            left = ", ".join(f"{k} : {print_type(gamma[k])}" for k in sorted(gamma))
            io.say(f"{left} |- {print_type(ty)}".strip())
            if args.explain:
                io.say()
                for line in derivation_lam(term):
                    io.say(line)


# --------------------------------------------------------------------------
# reduce


def _choose(options: Sequence[str], io: IO) -> int | None:
    """Ask for a 1-based choice; ``None`` on ``q`` or end of input."""
    for i, text in enumerate(options, 1):
        io.say(f"  [{i}] {text}")
    while True:
        io.out.write(f"choose 1-{len(options)} (q to stop): ")
        io.out.flush()
        line = io.inp.readline()
        if not line or line.strip().lower() in ("q", "quit"):
            io.say()
            return None
        try:
            k = int(line)
        except ValueError:
            continue
        if 1 <= k <= len(options):
            return k - 1


def cmd_reduce(args: argparse.Namespace, io: IO) -> None:
    if args.max_steps < 0:
        raise UsageError("--max-steps must be non-negative")
    if args.repl_budget < 0:
        raise UsageError("--repl-budget must be non-negative")
    calc = args.calc
    term = _parse(calc, _read_source(args, io), allow_active=args.allow_active)
    if calc == "x":
        strategy = Strategy(args.strategy)
        supply = FreshSupply.after(x_names(term))

        def moves(t):
            return [(str(r), lambda r=r: apply_redex(t, r, supply, strategy)) for r in find_redexes(t, strategy)]

        show = print_xnet
    else:
        if args.strategy != "full":
            raise UsageError("--strategy applies to x only")
        term = cnf(term)

        def moves(t):
            return [(str(r), lambda q=q: q) for r, q in pi_step_tagged(t, args.repl_budget)]

        show = print_pi
    final = _run(term, moves, show, args.max_steps, args.interactive, io)
    if moves(final) and not args.interactive:
        io.err.write(f"stopped after {args.max_steps} steps; redexes remain\n")


def _run(term, moves: Callable, show: Callable, max_steps: int, interactive: bool, io: IO):
    current = term
    for _ in range(max_steps):
        options = moves(current)
        if not options:
            break
        k = 0
        if interactive:
            io.say(show(current))
            k = _choose([label for label, _ in options], io)
            if k is None:
                break
        label, fire = options[k]
        current = fire()
        io.say(f"{label} => {show(current)}")
    return current


# --------------------------------------------------------------------------
# encode


def cmd_encode(args: argparse.Namespace, io: IO) -> None:
    pair = (args.source_calc, args.to)
    if pair not in (("x", "pi"), ("lam", "x"), ("lam", "pi")):
        raise UsageError(f"cannot encode {pair[0]} into {pair[1]}; supported: x->pi, lam->x, lam->pi")
    if args.plug is not None and args.source_calc != "lam":
        raise UsageError("--plug applies to --from lam only")
    term = _parse(args.source_calc, _read_source(args, io), allow_active=True)
    match pair:
        case ("x", "pi"):
            io.say(print_pi(encode_x(term)))
        case ("lam", target):
            plug = args.plug or "a"
            try:
                image = encode_lam_to_x(term, plug) if target == "x" else encode_lam_to_pi(term, plug)
            except ValueError as e:
                raise UsageError(str(e)) from None
            io.say(print_xnet(image) if target == "x" else print_pi(image))


# --------------------------------------------------------------------------
# simulate


def _parse_rule(text: str) -> XRule:
    for rule in XRule:
        if text in (rule.value, rule.name, rule.name.lower()):
            return rule
    raise UsageError(f"unknown rule {text!r}")


def _parse_step(text: str) -> Redex:
    path, sep, rule = text.rpartition("/")
    if not sep:
        raise UsageError("--step expects PATH/RULE, e.g. ./Ax or .1.0/cap‡")
    try:
        return Redex(parse_path(path), _parse_rule(rule))
    except ValueError:
        raise UsageError(f"bad path {path!r}") from None


def cmd_simulate(args: argparse.Namespace, io: IO) -> None:
    net = _parse("x", _read_source(args, io), allow_active=True)
    available = find_redexes(net)
    if args.step is None:
        if len(available) != 1:
            listing = "\n".join(f"  {format_path(r.path)}/{r.rule.value}" for r in available) or "  (none)"
            raise UsageError(f"choose a step with --step PATH/RULE; redexes:\n{listing}")
        redex = available[0]
    else:
        redex = _parse_step(args.step)
    try:
        after = apply_redex(net, redex)
    except RedexMismatch as e:
        raise UsageError(f"no such redex: {e}") from None
    source, target = encode_x(net), encode_x(after)
    io.say(f"STEP: {format_path(redex.path)}/{redex.rule.value} => {print_xnet(after)}")
    io.say(f"SOURCE: {print_pi(source)}")
    io.say(f"TARGET: {print_pi(target)}")
    found = find_simulating(
        source,
        target,
        args.depth,
        args.repl_budget,
        args.sim_depth,
        args.rounds,
        min_steps=1 if args.strict else 0,
    )
    for k, q in enumerate(found.path):
        io.say(f"STEP {k}: {print_pi(q)}")
    bounds = f"depth={args.depth}, budget={args.repl_budget}, sim-depth={args.sim_depth}, rounds={args.rounds}"
    if not found.ok:
        io.say(f"SIMULATES: no ({bounds})")
        reason = found.sim.reason if found.sim else "no candidate reached"
        raise CheckFailed(f"no simulating state within bounds: {reason}")
    io.say(f"SIMULATES: yes ({bounds})")


# --------------------------------------------------------------------------
# corpus


def _criteria(text: str | None) -> list[int] | None:
    if not text:
        return None
    try:
        picked = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"--only expects comma-separated criterion numbers, got {text!r}") from None
    if any(not 1 <= n <= 11 for n in picked):
        raise UsageError("criteria are numbered 1 to 11")
    return picked


def _seed(args: argparse.Namespace) -> int:
    if args.seed is not None:
        return args.seed
    try:
        return seed_from_env()
    except ValueError as e:
        raise UsageError(str(e)) from None


def cmd_corpus_run(args: argparse.Namespace, io: IO) -> None:
    only = _criteria(args.only)
    seed = _seed(args)

    def report(line: str) -> None:
        io.say(line)
        io.out.flush()

    results = run_all(seed, only, report)
    passed = sum(r.ok for r in results)
    io.say(f"{passed}/{len(results)} criteria passed (seed {seed})")
    if passed != len(results):
        raise CheckFailed(f"{len(results) - passed} criteria failed")


def cmd_corpus_gen(args: argparse.Namespace, io: IO) -> None:
    nets, lams = render_generated(_seed(args))
    if args.out is None:
        io.out.write(nets)
        io.out.write(lams)
        return
    out = Path(args.out)
    if not out.is_dir():
        raise UsageError(f"{out} is not a directory")
    (out / "generated.txt").write_text(nets, encoding="utf-8")
    (out / "lambda_generated.txt").write_text(lams, encoding="utf-8")


# --------------------------------------------------------------------------
# argument parsing


def _add_source(p: argparse.ArgumentParser) -> None:
    p.add_argument("term", nargs="?", help="the term itself")
    p.add_argument("-f", "--file", help="read the term from FILE ('-' for standard input)")
    p.add_argument("-e", "--entry", help="a named entry of the bundled corpus")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="seqpi", description="X nets, pi processes and the encoding between them.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("check", help="parse a term, print it and its free names")
    p.add_argument("--calc", choices=("x", "pi", "lam"), required=True)
    p.add_argument("--ctx", help="also type-check against this context file")
    p.add_argument("--explain", action="store_true", help="print the derivation")
    _add_source(p)
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("typecheck", help="principal typing (x, lam) or check against --ctx (x, pi)")
    p.add_argument("--calc", choices=("x", "pi", "lam"), required=True)
    p.add_argument("--ctx", help="context file: 'sock x : T' / 'plug a : T' for x, 'in n : T' / 'out n : T' for pi")
    p.add_argument("--explain", action="store_true", help="print the derivation")
    _add_source(p)
    p.set_defaults(run=cmd_typecheck)

    p = sub.add_parser("reduce", help="print a reduction trace")
    p.add_argument("--calc", choices=("x", "pi"), required=True)
    p.add_argument("--strategy", choices=("full", "cbn", "cbv"), default="full")
    p.add_argument("--max-steps", type=int, default=100)
    p.add_argument("--interactive", action="store_true", help="choose each redex from a numbered list on standard input")
    p.add_argument("--repl-budget", type=int, default=REPL_BUDGET, help="pi: copies of a replicated body per step")
    p.add_argument("--allow-active", action="store_true", help="x: accept activated cuts in the input")
    _add_source(p)
    p.set_defaults(run=cmd_reduce)

    p = sub.add_parser("encode", help="translate a term")
    p.add_argument("--from", dest="source_calc", choices=("x", "lam"), required=True)
    p.add_argument("--to", choices=("pi", "x"), required=True)
    p.add_argument("--plug", help="output plug of a lambda term (default a)")
    _add_source(p)
    p.set_defaults(run=cmd_encode)

    p = sub.add_parser("simulate", help="check that the encoding simulates one X step")
    p.add_argument("--step", help="PATH/RULE, e.g. ./Ax; optional when the net has one redex")
    p.add_argument("--depth", type=int, default=SEARCH_DEPTH, help="search depth from the encoded source")
    p.add_argument("--repl-budget", type=int, default=REPL_BUDGET)
    p.add_argument("--sim-depth", type=int, default=SIM_DEPTH, help="answer depth in the simulation game")
    p.add_argument("--rounds", type=int, default=SIM_ROUNDS, help="rounds of the simulation game")
    p.add_argument("--strict", action="store_true", help="require at least one pi step")
    _add_source(p)
    p.set_defaults(run=cmd_simulate, calc="x")

    p = sub.add_parser("corpus-run", help="run the acceptance suite over the bundled corpus")
    p.add_argument("--only", help="comma-separated criterion numbers")
    p.add_argument("--seed", type=int, help="generator seed (default: SEQPI_SEED or the built-in seed)")
    p.set_defaults(run=cmd_corpus_run)

    p = sub.add_parser("corpus-gen", help="regenerate the generated corpus files")
    p.add_argument("--seed", type=int, help="generator seed (default: SEQPI_SEED or the built-in seed)")
    p.add_argument("--out", help="directory to write into (default: standard output)")
    p.set_defaults(run=cmd_corpus_gen)
    return parser


def main(argv: Sequence[str] | None = None, stdin: TextIO | None = None, stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    io = IO(stdout or sys.stdout, stderr or sys.stderr, stdin or sys.stdin)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    for flag in ("depth", "sim_depth", "rounds", "repl_budget"):
        if getattr(args, flag, 0) < 0:
            io.err.write(f"seqpi: --{flag.replace('_', '-')} must be non-negative\n")
            return 2
    try:
        args.run(args, io)
    except UsageError as e:
        io.err.write(f"seqpi: {e}\n")
        return 2
    except CheckFailed as e:
        io.err.write(f"seqpi: {e}\n")
        return 1
    return 0


def entry() -> None:
    sys.exit(main())


__all__ = ["build_parser", "main"]
