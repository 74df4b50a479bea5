"""Brute-force reference implementations used to cross-check the engines.

The X oracle re-derives redexes from a table of rule shapes and its own
free-name computation. The pi oracle computes one-step reducts directly
from the closure rules: it lists the congruent "thread" decompositions of
a process (restrictions extruded, each active replication either kept or
unfolded once), synchronises pairs of threads, and recurses under input
prefixes.
"""

from __future__ import annotations

import random
import time
from collections.abc import Callable, Iterator
from dataclasses import dataclass, field
from functools import lru_cache

from . import pisyntax as pi
from .pirewrite import pi_step
from .pisyntax import In, Let, Nil, Out, Pair, Par, PiProcess, Repl, Res
from .xrewrite import Redex, Strategy, XRule, find_redexes
from .xsyntax import Capsule, Cut, CutL, CutR, Export, FreshSupply, Import, XNet

FREE_SOCKETS = ("x", "y")
FREE_PLUGS = ("a", "b")
FREE_PI_NAMES = ("a", "b")


# --------------------------------------------------------------------------
# X nets


_CACHE_SIZE = 4


@lru_cache(maxsize=None)
def _nets(size: int, socks: tuple[str, ...], plugs: tuple[str, ...], active: bool) -> tuple[XNet, ...]:
    return tuple(_iter_nets(size, socks, plugs, active))


def _iter_nets(size: int, socks: tuple[str, ...], plugs: tuple[str, ...], active: bool) -> Iterator[XNet]:
    if size < 1:
        return
    if size == 1:
        yield from (Capsule(x, a) for x in socks for a in plugs)
        return

    def sub(n, s, p):
        return _nets(n, s, p, active) if n <= _CACHE_SIZE else _iter_nets(n, s, p, active)

    # binder names depend only on scope depth, so equal shapes share them
    nx, na = f"u{len(socks)}", f"c{len(plugs)}"
    for b in plugs:
        yield from (Export(nx, p, na, b) for p in sub(size - 1, socks + (nx,), plugs + (na,)))
    kinds = (Cut, CutL, CutR) if active else (Cut,)
    for left_size in range(1, size - 1):
        for p in sub(left_size, socks, plugs + (na,)):
            for q in sub(size - 1 - left_size, socks + (nx,), plugs):
                for y in socks:
                    yield Import(p, na, y, nx, q)
                for k in kinds:
                    yield k(p, na, nx, q)


@lru_cache(maxsize=None)
def _count_nets(size: int, socks: int, plugs: int, active: bool) -> int:
    if size == 1:
        return socks * plugs
    total = plugs * _count_nets(size - 1, socks + 1, plugs + 1, active)
    per_pair = socks + (3 if active else 1)
    for left_size in range(1, size - 1):
        total += per_pair * _count_nets(left_size, socks, plugs + 1, active) * _count_nets(
            size - 1 - left_size, socks + 1, plugs, active
        )
    return total


def enumerate_nets(size: int, active: bool = True) -> Iterator[XNet]:
    """Every net of exactly ``size`` constructors over sockets x, y and plugs
    a, b, one representative per alpha class (lazily)."""
    return _iter_nets(size, FREE_SOCKETS, FREE_PLUGS, active)


def count_nets(size: int, active: bool = True) -> int:
    return _count_nets(size, len(FREE_SOCKETS), len(FREE_PLUGS), active)


def _free(net: XNet) -> tuple[set[str], set[str]]:
    """(free sockets, free plugs) by walking occurrences with explicit scopes."""
    socks: set[str] = set()
    plugs: set[str] = set()
    stack: list[tuple[XNet, frozenset[str], frozenset[str]]] = [(net, frozenset(), frozenset())]
    while stack:
        n, bs, bp = stack.pop()
        if isinstance(n, Capsule):
            if n.sock not in bs:
                socks.add(n.sock)
            if n.plug not in bp:
                plugs.add(n.plug)
        elif isinstance(n, Export):
            if n.plug not in bp:
                plugs.add(n.plug)
            stack.append((n.body, bs | {n.sock}, bp | {n.inner}))
        elif isinstance(n, Import):
            if n.mid not in bs:
                socks.add(n.mid)
            stack.append((n.left, bs, bp | {n.plug}))
            stack.append((n.right, bs | {n.sock}, bp))
        else:
            stack.append((n.left, bs, bp | {n.plug}))
            stack.append((n.right, bs | {n.sock}, bp))
    return socks, plugs


def _intro_sock(n: XNet, x: str) -> bool:
    if isinstance(n, Capsule):
        return n.sock == x
    if isinstance(n, Import):
        return n.mid == x and x not in _free(n.left)[0] and x not in _free(n.right)[0]
    return False


def _intro_plug(n: XNet, a: str) -> bool:
    if isinstance(n, Capsule):
        return n.plug == a
    if isinstance(n, Export):
        return n.plug == a and a not in _free(n.body)[1]
    return False


# rule -> (cut kind, left shape, right shape, side condition on the cut node)
_ANY = object
_RULES: list[tuple[XRule, type, type, type, Callable[[XNet], bool]]] = [
    (XRule.AX, Cut, Capsule, Capsule, lambda c: _intro_plug(c.left, c.plug) and _intro_sock(c.right, c.sock)),
    (XRule.EXP_REN, Cut, Export, Capsule, lambda c: _intro_plug(c.left, c.plug) and _intro_sock(c.right, c.sock)),
    (XRule.IMP_REN, Cut, Capsule, Import, lambda c: _intro_plug(c.left, c.plug) and _intro_sock(c.right, c.sock)),
    (XRule.EXP_IMP_LEFT, Cut, Export, Import, lambda c: _intro_plug(c.left, c.plug) and _intro_sock(c.right, c.sock)),
    (XRule.EXP_IMP_RIGHT, Cut, Export, Import, lambda c: _intro_plug(c.left, c.plug) and _intro_sock(c.right, c.sock)),
    (XRule.ACT_L, Cut, _ANY, _ANY, lambda c: not _intro_plug(c.left, c.plug)),
    (XRule.ACT_R, Cut, _ANY, _ANY, lambda c: not _intro_sock(c.right, c.sock)),
    (XRule.D_L, CutL, Capsule, _ANY, lambda c: c.left.plug == c.plug),
    (XRule.CAP_L, CutL, Capsule, _ANY, lambda c: c.left.plug != c.plug),
    (XRule.EXP_OUTS_L, CutL, Export, _ANY, lambda c: c.left.plug == c.plug),
    (XRule.EXP_INS_L, CutL, Export, _ANY, lambda c: c.left.plug != c.plug),
    (XRule.IMP_L, CutL, Import, _ANY, lambda c: True),
    (XRule.CUT_L, CutL, Cut, _ANY, lambda c: True),
    (XRule.R_D, CutR, _ANY, Capsule, lambda c: c.right.sock == c.sock),
    (XRule.R_CAP, CutR, _ANY, Capsule, lambda c: c.right.sock != c.sock),
    (XRule.R_EXP, CutR, _ANY, Export, lambda c: True),
    (XRule.R_IMP_OUTS, CutR, _ANY, Import, lambda c: c.right.mid == c.sock),
    (XRule.R_IMP_INS, CutR, _ANY, Import, lambda c: c.right.mid != c.sock),
    (XRule.R_CUT, CutR, _ANY, Cut, lambda c: True),
]


def _strategy_allows(rule: XRule, c: XNet, strategy: Strategy) -> bool:
    if strategy is Strategy.CBV:
        if rule is XRule.EXP_IMP_RIGHT:
            return False
        if rule is XRule.ACT_R:
            return _intro_plug(c.left, c.plug)
    if strategy is Strategy.CBN:
        if rule is XRule.EXP_IMP_LEFT:
            return False
        if rule is XRule.ACT_L:
            return _intro_sock(c.right, c.sock)
    return True


def _positions(net: XNet, path: tuple[int, ...] = ()) -> Iterator[tuple[tuple[int, ...], XNet]]:
    yield path, net
    if isinstance(net, Export):
        yield from _positions(net.body, path + (0,))
    elif not isinstance(net, Capsule):
        yield from _positions(net.left, path + (0,))
        yield from _positions(net.right, path + (1,))


def oracle_redexes(net: XNet, strategy: Strategy = Strategy.FULL) -> set[Redex]:
    found = set()
    for path, sub in _positions(net):
        for rule, kind, lshape, rshape, cond in _RULES:
            if type(sub) is not kind:
                continue
            if lshape is not _ANY and type(sub.left) is not lshape:
                continue
            if rshape is not _ANY and type(sub.right) is not rshape:
                continue
            if cond(sub) and _strategy_allows(rule, sub, strategy):
                found.add(Redex(path, rule))
    return found


# --------------------------------------------------------------------------
# pi processes


@lru_cache(maxsize=None)
def _procs(size: int, scope: tuple[str, ...]) -> tuple[PiProcess, ...]:
    return tuple(_iter_procs(size, scope))


def _iter_procs(size: int, scope: tuple[str, ...]) -> Iterator[PiProcess]:
    if size < 1:
        return
    if size == 1:
        data = list(scope) + [Pair(l, r) for l in scope for r in scope]
        yield pi.NIL
        yield from (Out(a, d) for a in scope for d in data)
        return

    def sub(n, sc):
        return _procs(n, sc) if n <= _CACHE_SIZE else _iter_procs(n, sc)

    k = len(scope)
    n, v, l, r = f"n{k}", f"v{k}", f"l{k}", f"r{k}"
    yield from (Repl(p) for p in sub(size - 1, scope))
    yield from (Res(n, p) for p in sub(size - 1, scope + (n,)))
    for a in scope:
        yield from (In(a, v, p) for p in sub(size - 1, scope + (v,)))
    for z in scope:
        yield from (Let(l, r, z, p) for p in sub(size - 1, scope + (l, r)))
    for left_size in range(1, size - 1):
        for p in sub(left_size, scope):
            for q in sub(size - 1 - left_size, scope):
                yield Par(p, q)


@lru_cache(maxsize=None)
def _count_procs(size: int, k: int) -> int:
    if size == 1:
        return 1 + k * (k + k * k)
    total = _count_procs(size - 1, k) + _count_procs(size - 1, k + 1)
    total += k * _count_procs(size - 1, k + 1) + k * _count_procs(size - 1, k + 2)
    for left_size in range(1, size - 1):
        total += _count_procs(left_size, k) * _count_procs(size - 1 - left_size, k)
    return total


def enumerate_processes(size: int) -> Iterator[PiProcess]:
    """Every process of exactly ``size`` constructors over free names a, b
    (binders named by scope depth), lazily."""
    return _iter_procs(size, FREE_PI_NAMES)


def count_processes(size: int) -> int:
    return _count_procs(size, len(FREE_PI_NAMES))


@dataclass(frozen=True)
class _Thread:
    proc: PiProcess
    # identifiers of the replication copies this thread was taken from
    origin: frozenset[int]


@dataclass
class _Variant:
    binders: list[str]
    threads: list[_Thread]
    unfolded: set[int] = field(default_factory=set)


def _decompositions(p: PiProcess, supply: FreshSupply, counter: list[int]) -> list[_Variant]:
    """Congruent forms ``new binders (t1 | ... | tn)`` of ``p`` where each
    active replication is either kept or unfolded once."""

    def go(q: PiProcess, origin: frozenset[int]) -> list[_Variant]:
        match q:
            case Nil():
                return [_Variant([], [])]
            case Par(procs):
                acc = [_Variant([], [])]
                for r in procs:
                    acc = [
                        _Variant(a.binders + b.binders, a.threads + b.threads, a.unfolded | b.unfolded)
                        for a in acc
                        for b in go(r, origin)
                    ]
                return acc
            case Res(n, body):
                m = supply.fresh(n.split("#")[0])
                out = go(pi.substitute(body, {n: m}, supply), origin)
                for v in out:
                    v.binders.insert(0, m)
                return out
            case Repl(body):
                kept = [_Variant([], [_Thread(q, origin)])]
                counter[0] += 1
                ident = counter[0]
                copy = pi.refresh(body, supply)
                unfolded = []
                for v in go(copy, origin | {ident}):
                    v.threads.append(_Thread(q, origin))
                    v.unfolded.add(ident)
                    unfolded.append(v)
                return kept + unfolded
        return [_Variant([], [_Thread(q, origin)])]

    return go(p, frozenset())


def oracle_pi_step(p: PiProcess) -> set[str]:
    """Keys of the one-step reducts of ``p`` with every replication unfolded
    at most once (replication budget 1)."""
    return {pi.key(pi.cnf(q)) for q in _reducts(p)}


def _reducts(p: PiProcess) -> list[PiProcess]:
    supply = FreshSupply.after(pi.all_names(p))
    out = []
    for v in _decompositions(p, supply, [0]):
        procs = [t.proc for t in v.threads]
        for i, t in enumerate(v.threads):
            if not isinstance(t.proc, In) or not isinstance(t.proc.chan, str):
                continue
            for j, s in enumerate(v.threads):
                if i == j or not isinstance(s.proc, Out) or s.proc.chan != t.proc.chan:
                    continue
                # every unfolded copy must contribute an actor
                if v.unfolded != (t.origin | s.origin):
                    continue
                rest = [q for k, q in enumerate(procs) if k not in (i, j)]
                body = pi.substitute(t.proc.body, {t.proc.var: s.proc.datum}, supply)
                out.append(pi.res(v.binders, Par(*rest, body)))
            # nesting: reduce under the input prefix
            if v.unfolded != set(t.origin):
                continue
            for inner in _reducts(t.proc.body):
                rest = [q for k, q in enumerate(procs) if k != i]
                out.append(pi.res(v.binders, Par(*rest, In(t.proc.chan, t.proc.var, inner))))
    return out


# --------------------------------------------------------------------------
# random terms of a given size


def random_net(rng: random.Random, size: int, socks=FREE_SOCKETS, plugs=FREE_PLUGS) -> XNet:
    if size <= 1:
        return Capsule(rng.choice(socks), rng.choice(plugs))
    nx, na = f"u{len(socks)}", f"c{len(plugs)}"
    if size == 2 or rng.random() < 0.2:
        return Export(nx, random_net(rng, size - 1, socks + (nx,), plugs + (na,)), na, rng.choice(plugs))
    left_size = rng.randint(1, size - 2)
    p = random_net(rng, left_size, socks, plugs + (na,))
    q = random_net(rng, size - 1 - left_size, socks + (nx,), plugs)
    kind = rng.choice((Import, Cut, CutL, CutR))
    if kind is Import:
        return Import(p, na, rng.choice(socks), nx, q)
    return kind(p, na, nx, q)


def random_process(rng: random.Random, size: int, scope=FREE_PI_NAMES) -> PiProcess:
    if size <= 1:
        if rng.random() < 0.15:
            return pi.NIL
        d = rng.choice(scope) if rng.random() < 0.7 else Pair(rng.choice(scope), rng.choice(scope))
        return Out(rng.choice(scope), d)
    k = len(scope)
    n, v, l, r = f"n{k}", f"v{k}", f"l{k}", f"r{k}"
    match rng.choice(("repl", "res", "in", "in", "let", "par", "par", "par")) if size > 2 else rng.choice(
        ("repl", "res", "in", "let")
    ):
        case "repl":
            return Repl(random_process(rng, size - 1, scope))
        case "res":
            return Res(n, random_process(rng, size - 1, scope + (n,)))
        case "in":
            return In(rng.choice(scope), v, random_process(rng, size - 1, scope + (v,)))
        case "let":
            return Let(l, r, rng.choice(scope), random_process(rng, size - 1, scope + (l, r)))
    left = rng.randint(1, size - 2)
    return Par(random_process(rng, left, scope), random_process(rng, size - 1 - left, scope))


# --------------------------------------------------------------------------
# agreement runs


def x_agrees(net: XNet) -> bool:
    return all(set(find_redexes(net, s)) == oracle_redexes(net, s) for s in Strategy)


def pi_agrees(p: PiProcess) -> bool:
    return {pi.key(q) for q in pi_step(p, 1)} == oracle_pi_step(p)


@dataclass
class OracleRun:
    """Outcome of an exhaustive-then-sampled agreement run for one engine."""

    name: str
    target_size: int
    complete_size: int = 0
    checked: int = 0
    partial: tuple[int, int, int] | None = None  # (size, checked, total)
    sampled: int = 0
    mismatches: list[str] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def complete(self) -> bool:
        return self.complete_size >= self.target_size

    @property
    def ok(self) -> bool:
        return self.complete and not self.mismatches

    def summary(self) -> str:
        text = f"{self.name}: exhaustive to size {self.complete_size} of {self.target_size} ({self.checked} terms)"
        if self.partial:
            size, done, total = self.partial
            text += f", size {size} {done}/{total}"
        if self.sampled:
            text += f", {self.sampled} sampled beyond"
        text += f", {len(self.mismatches)} mismatches, {self.seconds:.1f}s"
        return text


def run_agreement(
    name: str,
    enumerate_size: Callable[[int], Iterator],
    count_size: Callable[[int], int],
    random_term: Callable[[random.Random, int], object],
    agrees: Callable[[object], bool],
    show: Callable[[object], str],
    target_size: int,
    budget: float,
    sample_budget: float,
    seed: int,
) -> OracleRun:
    """Check every term by increasing size until ``budget`` seconds pass,
    then spend ``sample_budget`` seconds on random terms of the sizes left."""
    run = OracleRun(name, target_size)
    start = time.perf_counter()
    deadline = start + budget
    for size in range(1, target_size + 1):
        for i, t in enumerate(enumerate_size(size)):
            if time.perf_counter() > deadline:
                run.partial = (size, i, count_size(size))
                break
            if not agrees(t):
                run.mismatches.append(show(t))
            run.checked += 1
        if run.partial:
            break
        run.complete_size = size
    if not run.complete:
        rng = random.Random(seed)
        stop = time.perf_counter() + sample_budget
        while time.perf_counter() < stop:
            t = random_term(rng, rng.randint(run.complete_size + 1, target_size))
            if not agrees(t):
                run.mismatches.append(show(t))
            run.sampled += 1
    run.seconds = time.perf_counter() - start
    return run
