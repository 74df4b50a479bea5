"""The acceptance suite: eleven end-to-end checks over the bundled corpus.

Each check returns a ``CriterionResult``; ``run_all`` runs them in order.
Both ``seqpi corpus-run`` and the test-suite use this module.
"""

from __future__ import annotations

import time
from collections.abc import Callable
from dataclasses import dataclass

from . import pisyntax as pi
from .corpus import DEFAULT_SEED, corpus_lambda, corpus_nets, generate_typed_nets, intro_cuts, peirce
from .encode import beta_steps, encode_lam_to_pi, encode_lam_to_x, encode_x, infer_lam, print_lam
from .oracles import (
    count_nets,
    count_processes,
    enumerate_nets,
    enumerate_processes,
    pi_agrees,
    random_net,
    random_process,
    run_agreement,
    x_agrees,
)
from .pirewrite import Explorer, barbs, find_simulating, pi_step
from .pitypes import explain_pi
from .xrewrite import CORE_RULES, Redex, XRule, apply_redex, step_all, step_all_tagged
from .xsyntax import alpha_eq, free_connectors, free_plugs, free_sockets, parse_xnet, print_xnet
from .xtypes import ContextPair, check_x, infer_x, principal_x

# bounds for the simulation search (criteria 7, 8, 9b)
SEARCH_DEPTH = 8
REPL_BUDGET = 2
SIM_DEPTH = 3
SIM_ROUNDS = 2

# criterion 4
WITNESS_NETS = 200
WITNESS_MAX_SIZE = 9
WITNESS_SECONDS = 60.0

# criterion 5
PI_WITNESS_DEPTH = 3

# criterion 10: exhaustive targets and the time split between the engines
ORACLE_X_SIZE = 7
ORACLE_PI_SIZE = 6
ORACLE_SECONDS = 120.0
ORACLE_SPLIT = {"x": (48.0, 10.0), "pi": (48.0, 10.0)}

PEIRCE_TYPING = "|- g : ((A -> B) -> A) -> A"


@dataclass(frozen=True)
class CriterionResult:
    number: int
    title: str
    ok: bool
    detail: str
    seconds: float

    def line(self) -> str:
        verdict = "PASS" if self.ok else "FAIL"
        return f"{verdict} [{self.number:2d}] {self.title}: {self.detail} ({self.seconds:.1f}s)"


def _timed(number: int, title: str, body: Callable[[], tuple[bool, str]]) -> CriterionResult:
    start = time.perf_counter()
    ok, detail = body()
    return CriterionResult(number, title, ok, detail, time.perf_counter() - start)


def _first(items: list[str], limit: int = 3) -> str:
    more = f" (+{len(items) - limit} more)" if len(items) > limit else ""
    return "; ".join(items[:limit]) + more


def _typed_corpus() -> list[tuple[str, object, ContextPair]]:
    return [(e.name, net, infer_x(net)[0]) for e, net in corpus_nets()]


# --------------------------------------------------------------------------
# 1-3: examples


def peirce_law() -> tuple[bool, str]:
    got = str(principal_x(peirce()))
    return got == PEIRCE_TYPING, got


# (rule, redex, expected right-hand side)
LOGICAL_CASES = [
    (XRule.AX, "cut(<y.a> | a / x | <x.b>)", "<y.b>"),
    (XRule.EXP_REN, "cut(exp(y; <y.c>; c).a | a / x | <x.g>)", "exp(y; <y.c>; c).g"),
    (
        XRule.IMP_REN,
        "cut(<y.a> | a / x | imp(<z.b> | b / [x] / w | <w.g>))",
        "imp(<z.b> | b / [y] / w | <w.g>)",
    ),
    (
        XRule.EXP_IMP_LEFT,
        "cut(exp(y; <y.c>; c).a | a / x | imp(<z.b> | b / [x] / w | <w.g>))",
        "cut(<z.b> | b / y | cut(<y.c> | c / w | <w.g>))",
    ),
    (
        XRule.EXP_IMP_RIGHT,
        "cut(exp(y; <y.c>; c).a | a / x | imp(<z.b> | b / [x] / w | <w.g>))",
        "cut(cut(<z.b> | b / y | <y.c>) | c / w | <w.g>)",
    ),
]


def logical_rules() -> tuple[bool, str]:
    bad = []
    for rule, lhs, rhs in LOGICAL_CASES:
        got = apply_redex(parse_xnet(lhs), Redex((), rule))
        if not alpha_eq(got, parse_xnet(rhs)):
            bad.append(f"{rule.value} gave {print_xnet(got)}")
    return not bad, _first(bad) if bad else f"{len(LOGICAL_CASES)} right-hand sides match"


def non_confluence() -> tuple[bool, str]:
    start = parse_xnet("cut(<x.a> | g / z | <y.b>)")
    targets = {"<x.a>": parse_xnet("<x.a>"), "<y.b>": parse_xnet("<y.b>")}
    frontier, seen = [start], [start]
    for _ in range(2):
        frontier = [q for p in frontier for q in step_all(p)]
        seen.extend(frontier)
    missing = [t for t, n in targets.items() if not any(alpha_eq(n, s) for s in seen)]
    if missing:
        return False, f"not reached within 2 steps: {', '.join(missing)}"
    return True, "both <x.a> and <y.b> reached within 2 steps"


# --------------------------------------------------------------------------
# 4-6: typing


def x_witness_reduction(seed: int = DEFAULT_SEED) -> tuple[bool, str]:
    start = time.perf_counter()
    nets = generate_typed_nets(seed, WITNESS_NETS, WITNESS_MAX_SIZE, need_redex=True)
    bad, steps = [], 0
    for net in nets:
        ctx = infer_x(net)[0]
        for r, red in step_all_tagged(net):
            steps += 1
            if not check_x(red, ctx):
                bad.append(f"{print_xnet(net)} --{r}--> {print_xnet(red)}")
    elapsed = time.perf_counter() - start
    detail = f"{len(nets)} nets (seed {seed}), {steps} reducts, {len(bad)} failures"
    if bad:
        detail += ": " + _first(bad)
    if elapsed > WITNESS_SECONDS:
        detail += f"; over the {WITNESS_SECONDS:.0f}s limit"
    return not bad and elapsed <= WITNESS_SECONDS, detail


def _pi_states(p: pi.PiProcess, depth: int) -> list[pi.PiProcess]:
    """Every process reachable from ``p`` in at most ``depth`` steps."""
    explorer = Explorer(REPL_BUDGET)
    return explorer.reach(pi.cnf(p), depth)


def pi_witness_reduction() -> tuple[bool, str]:
    bad, states = [], 0
    for name, net, ctx in _typed_corpus():
        for q in _pi_states(encode_x(net), PI_WITNESS_DEPTH):
            states += 1
            why = explain_pi(q, ctx)
            if why is not None:
                bad.append(f"{name}: {why}")
    detail = f"{states} processes from encoded corpus nets, {len(bad)} failures"
    return not bad, detail + (": " + _first(bad) if bad else "")


def encoding_preserves_types() -> tuple[bool, str]:
    bad = []
    corpus = _typed_corpus()
    for name, net, ctx in corpus:
        why = explain_pi(encode_x(net), ctx)
        if why is not None:
            bad.append(f"{name}: {why}")
    detail = f"{len(corpus)} corpus nets, {len(bad)} failures"
    return not bad, detail + (": " + _first(bad) if bad else "")


# --------------------------------------------------------------------------
# 7-9: simulation


def _simulates(source: pi.PiProcess, target: pi.PiProcess):
    return find_simulating(source, target, SEARCH_DEPTH, REPL_BUDGET, sim_depth=SIM_DEPTH, rounds=SIM_ROUNDS)


def simulation() -> tuple[bool, str]:
    bad, steps = [], 0
    covered: set[XRule] = set()
    for e, net in corpus_nets():
        source = encode_x(net)
        for r, red in step_all_tagged(net):
            steps += 1
            covered.add(r.rule)
            if not _simulates(source, encode_x(red)).ok:
                bad.append(f"{e.name} {r}")
    missing = [r.value for r in CORE_RULES if r not in covered]
    detail = f"{steps} steps, {len(covered)}/{len(CORE_RULES)} rule tags, {len(bad)} failures"
    if missing:
        detail += f"; tags not exercised: {', '.join(missing)}"
    if bad:
        detail += ": " + _first(bad)
    return not bad and not missing, detail


def intro_targets() -> dict[str, pi.PiProcess]:
    """The encoded target of each introductory capsule cut."""

    def enc(text: str) -> pi.PiProcess:
        return encode_x(parse_xnet(text))

    return {
        "rename": enc("<x.b>"),
        "keep-left": enc("<x.a>"),
        "keep-right": enc("<z.b>"),
        "either": pi.par(enc("<x.a>"), enc("<y.b>")),
    }


def intro_table() -> tuple[bool, str]:
    targets = intro_targets()
    bad, rows = [], []
    for e, net in intro_cuts():
        target = targets[e.name]
        found = _simulates(encode_x(net), target)
        if not found.ok:
            bad.append(f"{e.name}: no simulating process")
            continue
        want, got = barbs(target), barbs(found.found)
        if want != got:
            bad.append(f"{e.name}: barbs {sorted(got)} != {sorted(want)}")
        rows.append(f"{e.name} in {len(found.path) - 1} steps")
    return not bad, _first(bad) if bad else ", ".join(rows)


def lambda_corollary() -> tuple[bool, str]:
    terms = [m for e, m in corpus_lambda() if e.group == "lambda_generated"]
    plug = "a"
    bad, steps = [], 0
    for m in terms:
        gamma, ty = infer_lam(m)
        text = print_lam(m)
        why = explain_pi(encode_lam_to_pi(m, plug), ContextPair(gamma, {plug: ty}))
        if why is not None:
            bad.append(f"(a) {text}: {why}")
        if free_plugs(encode_lam_to_x(m, plug)) != {plug}:
            bad.append(f"(c) {text}")
        source = encode_lam_to_pi(m, plug)
        for n in beta_steps(m):
            steps += 1
            if not _simulates(source, encode_lam_to_pi(n, plug)).ok:
                bad.append(f"(b) {text} -> {print_lam(n)}")
    detail = f"{len(terms)} terms, {steps} beta steps, {len(bad)} failures"
    ok = len(terms) >= 50 and not bad
    return ok, detail + (": " + _first(bad) if bad else "")


# --------------------------------------------------------------------------
# 10-11


def oracles(seed: int = DEFAULT_SEED) -> tuple[bool, str]:
    start = time.perf_counter()
    runs = [
        run_agreement(
            "find_redexes",
            enumerate_nets,
            count_nets,
            random_net,
            x_agrees,
            print_xnet,
            ORACLE_X_SIZE,
            *ORACLE_SPLIT["x"],
            seed,
        ),
        run_agreement(
            "pi_step",
            enumerate_processes,
            count_processes,
            random_process,
            pi_agrees,
            pi.print_pi,
            ORACLE_PI_SIZE,
            *ORACLE_SPLIT["pi"],
            seed,
        ),
    ]
    elapsed = time.perf_counter() - start
    detail = "; ".join(r.summary() for r in runs)
    mismatches = [m for r in runs for m in r.mismatches]
    if mismatches:
        detail += "; first mismatch: " + mismatches[0]
    return all(r.ok for r in runs) and elapsed <= ORACLE_SECONDS, detail


def free_name_monotonicity(seed: int = DEFAULT_SEED) -> tuple[bool, str]:
    bad = []
    x_steps = pi_steps = 0
    nets = [net for _, net in corpus_nets()] + generate_typed_nets(seed, WITNESS_NETS, WITNESS_MAX_SIZE, need_redex=True)
    for net in nets:
        fc = free_connectors(net)
        for r, red in step_all_tagged(net):
            x_steps += 1
            if not free_connectors(red) <= fc:
                bad.append(f"X {print_xnet(net)} --{r}-->")
    for _, net in corpus_nets():
        enc = encode_x(net)
        if pi.free_names(enc) != free_sockets(net) | free_plugs(net):
            bad.append(f"fn of encoding of {print_xnet(net)}")
        for p in _pi_states(enc, 1):
            fn = pi.free_names(p)
            for q in pi_step(p, REPL_BUDGET):
                pi_steps += 1
                if not pi.free_names(q) <= fn:
                    bad.append(f"pi {pi.print_pi(p)} -> {pi.print_pi(q)}")
    detail = f"{x_steps} X steps, {pi_steps} pi steps, {len(nets)} nets, {len(bad)} failures"
    return not bad, detail + (": " + _first(bad) if bad else "")


CRITERIA: list[tuple[int, str, Callable[..., tuple[bool, str]], bool]] = [
    # (number, title, check, takes a seed)
    (1, "Peirce typing", peirce_law, False),
    (2, "logical rules", logical_rules, False),
    (3, "non-confluence", non_confluence, False),
    (4, "X witness reduction", x_witness_reduction, True),
    (5, "pi witness reduction", pi_witness_reduction, False),
    (6, "encoding preserves types", encoding_preserves_types, False),
    (7, "simulation", simulation, False),
    (8, "intro capsule cuts", intro_table, False),
    (9, "lambda corollary", lambda_corollary, False),
    (10, "oracles", oracles, True),
    (11, "free-name monotonicity", free_name_monotonicity, True),
]


def run_criterion(number: int, seed: int = DEFAULT_SEED) -> CriterionResult:
    for n, title, check, seeded in CRITERIA:
        if n == number:
            return _timed(n, title, (lambda: check(seed)) if seeded else check)
    raise KeyError(f"no criterion {number}")


def run_all(seed: int = DEFAULT_SEED, only: list[int] | None = None, report: Callable[[str], None] | None = None):
    results = []
    for n, *_ in CRITERIA:
        if only and n not in only:
            continue
        result = run_criterion(n, seed)
        if report:
            report(result.line())
        results.append(result)
    return results
