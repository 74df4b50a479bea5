"""Reduction, barbs and bounded simulation for the pi-calculus with pairing.

A communication pairs an output with an input on the same channel. Both
must sit in active position below their nearest common ancestor (only
parallel composition, restriction and replication in between). Above that
ancestor, input prefixes may also occur: reduction under an input prefix
is allowed. ``let`` bodies are inert until the scrutinee is a literal pair.

Replication is unfolded on demand. A replicated subterm is copied once
when the communication happens inside one copy, and twice when the output
and the input come from two different copies. ``repl_budget`` bounds
these copies per replicated subterm.
"""

from __future__ import annotations

import heapq
from collections import Counter, deque
from collections.abc import Iterator
from dataclasses import dataclass, field

from .pisyntax import (
    NIL,
    In,
    Let,
    Out,
    Pair,
    Par,
    PiProcess,
    Repl,
    Res,
    all_names,
    cnf,
    components,
    datum_names,
    key,
    print_pi,
    refresh,
    res,
    substitute,
    uniquify,
)
from .xsyntax import FreshSupply

DEFAULT_BUDGET = 2
INF = float("inf")


@dataclass(frozen=True)
class PiRedex:
    """An output/input pair. ``split`` is the depth of the node where the
    two sides meet; ``copies`` is 2 when that node is a replication whose
    body is copied twice."""

    out_path: tuple[int, ...]
    in_path: tuple[int, ...]
    split: int
    copies: int
    channel: str

    def __str__(self) -> str:
        where = "two copies" if self.copies == 2 else "one copy"
        return f"{self.channel}: out@{_fmt(self.out_path)} in@{_fmt(self.in_path)} ({where})"


def _fmt(path: tuple[int, ...]) -> str:
    return "." + ".".join(map(str, path)) if path else "."


@dataclass(frozen=True)
class _Actor:
    path: tuple[int, ...]
    kinds: tuple[type, ...]
    node: In | Out


def _actors(p: PiProcess) -> list[_Actor]:
    found: list[_Actor] = []

    def go(q: PiProcess, path: tuple[int, ...], kinds: tuple[type, ...]) -> None:
        match q:
            case Par(procs):
                for i, r in enumerate(procs):
                    go(r, path + (i,), kinds + (Par,))
            case Res(_, body) | Repl(body):
                go(body, path + (0,), kinds + (type(q),))
            case In(a, _, body):
                if isinstance(a, str):
                    found.append(_Actor(path, kinds, q))
                go(body, path + (0,), kinds + (In,))
            case Out(a, _):
                if isinstance(a, str):
                    found.append(_Actor(path, kinds, q))

    go(p, (), ())
    return found


def find_pi_redexes(p: PiProcess, repl_budget: int = DEFAULT_BUDGET, active_only: bool = False) -> list[PiRedex]:
    """All communications of ``p`` (which should satisfy the Barendregt
    convention, e.g. be the output of ``cnf``). ``active_only`` drops those
    under an input prefix."""
    actors = _actors(p)
    outs = [a for a in actors if isinstance(a.node, Out)]
    ins = [a for a in actors if isinstance(a.node, In)]
    found = []
    for o in outs:
        for i in ins:
            if o.node.chan != i.node.chan:
                continue
            c = 0
            while c < len(o.path) and c < len(i.path) and o.path[c] == i.path[c]:
                c += 1
            if c == len(o.path) or c == len(i.path):
                continue  # one actor guards the other
            if Let in o.kinds[:c] or (active_only and In in o.kinds[:c]):
                continue
            if In in o.kinds[c + 1 :] or In in i.kinds[c + 1 :]:
                continue
            uses_repl = Repl in o.kinds or Repl in i.kinds
            if not uses_repl or repl_budget >= 1:
                found.append(PiRedex(o.path, i.path, c, 1, o.node.chan))
            if repl_budget >= 2:
                for r in range(c - 1, -1, -1):
                    if o.kinds[r] is In:
                        break
                    if o.kinds[r] is Repl:
                        found.append(PiRedex(o.path, i.path, r, 2, o.node.chan))
    return found


class _Invalid(Exception):
    pass


def apply_pi_redex(p: PiProcess, r: PiRedex, supply: FreshSupply | None = None) -> PiProcess:
    """Perform the communication ``r``; the result is in ``cnf``."""
    if supply is None:
        supply = FreshSupply.after(all_names(p))
    out_node: list[Out] = []

    def unfold(body: PiProcess, rest) -> PiProcess:
        return Par(rest(refresh(body, supply)), Repl(body))

    def side(q: PiProcess, path: tuple[int, ...], hole, binders: list[str]) -> PiProcess:
        if not path:
            return hole(q)
        k, rest = path[0], path[1:]
        match q:
            case Par(procs):
                kids = list(procs)
                kids[k] = side(kids[k], rest, hole, binders)
                return Par(*kids)
            case Res(n, body):
                binders.append(n)
                return side(body, rest, hole, binders)
            case Repl(body):
                return unfold(body, lambda copy: side(copy, rest, hole, binders))
        raise _Invalid("actor is not in active position")

    def take_out(q: PiProcess) -> PiProcess:
        if not isinstance(q, Out):
            raise _Invalid("expected an output")
        out_node.append(q)
        return NIL

    def take_in(q: PiProcess) -> PiProcess:
        if not isinstance(q, In) or q.chan != out_node[0].chan:
            raise _Invalid("channels differ")
        return substitute(q.body, {q.var: out_node[0].datum}, supply)

    def meet(q: PiProcess) -> PiProcess:
        binders: list[str] = []
        if r.copies == 2:
            if not isinstance(q, Repl):
                raise _Invalid("expected a replication")
            c1 = side(refresh(q.body, supply), r.out_path[r.split + 1 :], take_out, binders)
            c2 = side(refresh(q.body, supply), r.in_path[r.split + 1 :], take_in, binders)
            return Par(res(binders, Par(c1, c2)), q)
        if not isinstance(q, Par):
            raise _Invalid("expected a parallel composition")
        kids = list(q.procs)
        j, k = r.out_path[r.split], r.in_path[r.split]
        kids[j] = side(kids[j], r.out_path[r.split + 1 :], take_out, binders)
        kids[k] = side(kids[k], r.in_path[r.split + 1 :], take_in, binders)
        return res(binders, Par(*kids))

    def down(q: PiProcess, depth: int) -> PiProcess:
        if depth == r.split:
            return meet(q)
        k = r.out_path[depth]
        match q:
            case Par(procs):
                kids = list(procs)
                kids[k] = down(kids[k], depth + 1)
                return Par(*kids)
            case Res(n, body):
                return Res(n, down(body, depth + 1))
            case In(a, x, body):
                return In(a, x, down(body, depth + 1))
            case Repl(body):
                return unfold(body, lambda copy: down(copy, depth + 1))
        raise _Invalid("no reduction below this node")

    return cnf(down(p, 0))


def pi_step_tagged(
    p: PiProcess, repl_budget: int = DEFAULT_BUDGET, active_only: bool = False
) -> list[tuple[PiRedex, PiProcess]]:
    p = cnf(p)
    supply = FreshSupply.after(all_names(p))
    out = []
    for r in find_pi_redexes(p, repl_budget, active_only):
        try:
            out.append((r, apply_pi_redex(p, r, supply)))
        except _Invalid:
            continue
    return out


def pi_step(p: PiProcess, repl_budget: int = DEFAULT_BUDGET, active_only: bool = False) -> list[PiProcess]:
    """One-step reducts of ``p`` in ``cnf``, deduplicated up to congruence."""
    if repl_budget < 0:
        raise ValueError("repl_budget must be non-negative")
    seen: dict[str, PiProcess] = {}
    for _, q in pi_step_tagged(p, repl_budget, active_only):
        seen.setdefault(key(q), q)
    return list(seen.values())


# --------------------------------------------------------------------------
# observation


def barbs(p: PiProcess) -> frozenset[str]:
    """Free names carrying an unguarded output (replication does not guard)."""
    found: set[str] = set()

    def go(q: PiProcess, bound: frozenset[str]) -> None:
        match q:
            case Out(a, _):
                if isinstance(a, str) and a not in bound:
                    found.add(a)
            case Par(procs):
                for s in procs:
                    go(s, bound)
            case Res(n, body):
                go(body, bound | {n})
            case Repl(body):
                go(body, bound)
            case Let(_, _, Pair(), _):
                # a let on a literal pair is congruent to its instantiated body
                go(cnf(q), bound)

    go(p, frozenset())
    return frozenset(found)


def barb_distance(p: PiProcess, n: str) -> float:
    """A lower bound on the steps before ``p`` can show a barb on ``n``
    (``p`` should satisfy the Barendregt convention).

    ``t(c)`` bounds the steps before any output on ``c`` is unguarded. An
    output below input prefixes on ``c1 .. ck`` (outermost first) needs
    prefix ``i`` to fire, which takes a step after both prefix ``i - 1``
    and an output on ``ci``. An output whose subject is a variable may be
    on any name that is ever sent; names never sent stay that way.
    """
    outs: list[tuple[str, bool, tuple[str | None, ...]]] = []
    sent: set[str] = set()

    def go(q: PiProcess, guards: tuple[str | None, ...], variables: frozenset[str]) -> None:
        match q:
            case Out(a, d):
                sent.update(datum_names(d))
                if isinstance(a, str):
                    outs.append((a, a in variables, guards))
            case Par(procs):
                for r in procs:
                    go(r, guards, variables)
            case Res(_, body) | Repl(body):
                go(body, guards, variables)
            case In(a, x, body):
                chan = a if isinstance(a, str) and a not in variables else None
                go(body, guards + (chan,), variables | {x})
            case Let(x, y, z, body):
                sent.update(datum_names(z))
                go(body, guards, variables | {x, y})

    go(p, (), frozenset())
    t: dict[str, float] = {}
    anywhere = INF  # bound for outputs on variable subjects

    def ready(guards: tuple[str | None, ...]) -> float:
        done = 0.0
        for c in guards:
            need = 0.0 if c is None else min(t.get(c, INF), anywhere if c in sent else INF)
            done = max(done, need) + 1
        return done

    changed = True
    while changed:
        changed = False
        for a, variable, guards in outs:
            r = ready(guards)
            if variable:
                if r < anywhere:
                    anywhere, changed = r, True
            elif r < t.get(a, INF):
                t[a] = r
                changed = True
    return min(t.get(n, INF), anywhere if n in sent else INF)


def fold_replicas(p: PiProcess) -> PiProcess:
    """Absorb parallel copies ``R | !R`` into ``!R`` everywhere, then ``cnf``.

    The result is congruent to ``p``; it keeps search spaces finite.
    """
    return _fold(cnf(p))


def _fold(p: PiProcess) -> PiProcess:
    # ``p`` is in cnf
    changed = False

    def go(q: PiProcess) -> PiProcess:
        nonlocal changed
        match q:
            case Par(procs):
                kids = [go(s) for s in procs]
                replicated = {key(s.body) for s in kids if isinstance(s, Repl)}
                if not replicated:
                    return Par(*kids)
                keep = [s for s in kids if isinstance(s, Repl) or key(s) not in replicated]
                changed |= len(keep) != len(kids)
                return Par(*keep)
            case Res(n, body):
                return Res(n, go(body))
            case Repl(body):
                return Repl(go(body))
            case In(a, x, body):
                return In(a, x, go(body))
            case Let(x, y, z, body):
                return Let(x, y, z, go(body))
        return q

    while True:
        changed = False
        q = go(p)
        if not changed:
            return p
        p = cnf(q)


class Explorer:
    """Memoised one-step and bounded reachability over normalised states."""

    def __init__(self, repl_budget: int = DEFAULT_BUDGET) -> None:
        self.repl_budget = repl_budget
        self._steps: dict[tuple[str, bool], list[PiProcess]] = {}
        self._reach: dict[tuple[str, int, bool], list[PiProcess]] = {}

    def norm(self, p: PiProcess) -> PiProcess:
        return fold_replicas(p)

    def steps(self, p: PiProcess, active_only: bool = False) -> list[PiProcess]:
        k = (key(p), active_only)
        if k not in self._steps:
            seen: dict[str, PiProcess] = {}
            for q in pi_step(p, self.repl_budget, active_only):
                q = _fold(q)
                seen.setdefault(key(q), q)
            self._steps[k] = list(seen.values())
        return self._steps[k]

    def reach(self, p: PiProcess, depth: int, active_only: bool = False) -> list[PiProcess]:
        """States reachable in at most ``depth`` steps, breadth first (``p`` first)."""
        return list(self.iter_reach(p, depth, active_only))

    def iter_reach(self, p: PiProcess, depth: int, active_only: bool = False) -> Iterator[PiProcess]:
        """Lazy ``reach``: callers that stop early skip the rest of the search."""
        k = (key(p), depth, active_only)
        if k in self._reach:
            yield from self._reach[k]
            return
        order = [p]
        yield p
        seen = {key(p)}
        frontier = [p]
        for _ in range(depth):
            nxt = []
            for q in frontier:
                for s in self.steps(q, active_only):
                    ks = key(s)
                    if ks not in seen:
                        seen.add(ks)
                        order.append(s)
                        nxt.append(s)
                        yield s
            frontier = nxt
            if not frontier:
                break
        self._reach[k] = order


def weak_barb(p: PiProcess, n: str, depth: int, repl_budget: int = DEFAULT_BUDGET) -> bool:
    """Is an output on ``n`` observable after at most ``depth`` steps?"""
    explorer = Explorer(repl_budget)
    return any(n in barbs(q) for q in explorer.iter_reach(explorer.norm(p), depth, active_only=True))


def reachable(p: PiProcess, depth: int, repl_budget: int = DEFAULT_BUDGET) -> list[PiProcess]:
    explorer = Explorer(repl_budget)
    return explorer.reach(explorer.norm(p), depth)


# --------------------------------------------------------------------------
# bounded simulation


@dataclass
class SimResult:
    ok: bool
    reason: str = ""
    # the distinguishing moves of the simulated process, outermost first
    moves: list[PiProcess] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def _is_subcomposition(p: PiProcess, q: PiProcess) -> bool:
    need = Counter(key(c) for c in components(p))
    have = Counter(key(c) for c in components(q))
    return all(have[k] >= n for k, n in need.items())


class Simulator:
    """Bounded, context-free simulation game.

    ``P`` is simulated by ``Q`` to ``rounds`` if every barb of ``P`` is a
    weak barb of ``Q`` and each move ``P -> P'`` is answered by some
    ``Q ->* Q'`` (at most ``depth`` steps) with ``P'`` simulated by ``Q'``
    to ``rounds - 1``.
    """

    def __init__(self, depth: int, repl_budget: int = DEFAULT_BUDGET, rounds: int = 2, explorer: Explorer | None = None) -> None:
        if depth < 0 or rounds < 0:
            raise ValueError("depth and rounds must be non-negative")
        self.depth = depth
        self.rounds = rounds
        self.explorer = explorer or Explorer(repl_budget)
        self._memo: dict[tuple[str, str, int], SimResult] = {}
        self._weak: dict[str, set[str]] = {}

    def has_weak_barbs(self, q: PiProcess, names: frozenset[str]) -> frozenset[str]:
        """The subset of ``names`` that ``q`` cannot exhibit within ``depth`` steps."""
        known = self._weak.setdefault(key(q), set())
        missing = set(names) - known
        if not missing:
            return frozenset()
        # Best first on the distance bound. Steps under an input prefix never
        # expose a barb before the prefix fires, and states whose bound
        # exceeds the remaining depth are not expanded.
        def bound(s: PiProcess) -> float:
            return min(barb_distance(s, n) for n in missing)

        best_level = {key(q): 0}
        queue = [(bound(q), 0, 0, q)]
        tie = 1
        while queue:
            _, neg, _, s = heapq.heappop(queue)
            level = -neg
            if best_level[key(s)] < level:
                continue
            found = barbs(s)
            known |= found
            missing -= found
            if not missing:
                return frozenset()
            if level == self.depth:
                continue
            for t in self.explorer.steps(s, active_only=True):
                kt = key(t)
                if best_level.get(kt, self.depth + 1) <= level + 1:
                    continue
                h = bound(t)
                if level + 1 + h > self.depth:
                    continue
                best_level[kt] = level + 1
                heapq.heappush(queue, (level + 1 + h, -(level + 1), tie, t))
                tie += 1
        return frozenset(missing)

    def check(self, p: PiProcess, q: PiProcess) -> SimResult:
        ex = self.explorer
        return self._sim(ex.norm(p), ex.norm(q), self.rounds)

    def _sim(self, p: PiProcess, q: PiProcess, rounds: int) -> SimResult:
        memo_key = (key(p), key(q), rounds)
        if memo_key in self._memo:
            return self._memo[memo_key]
        result = self._play(p, q, rounds)
        self._memo[memo_key] = result
        return result

    def _play(self, p: PiProcess, q: PiProcess, rounds: int) -> SimResult:
        if _is_subcomposition(p, q):
            return SimResult(True, "contained")
        missing = self.has_weak_barbs(q, barbs(p))
        if missing:
            return SimResult(False, f"barb {sorted(missing)[0]} not matched within {self.depth} steps", [p])
        if rounds == 0:
            return SimResult(True)
        for p2 in self.explorer.steps(p):
            failures = []
            for q2 in self.explorer.iter_reach(q, self.depth):
                sub = self._sim(p2, q2, rounds - 1)
                if sub.ok:
                    break
                failures.append(sub)
            else:
                deepest = failures[0] if failures else SimResult(False)
                return SimResult(False, f"move {print_pi(p2)} not matched: {deepest.reason}", [p, *deepest.moves])
        return SimResult(True)


def bounded_simulates(
    p: PiProcess,
    q: PiProcess,
    depth: int,
    repl_budget: int = DEFAULT_BUDGET,
    rounds: int = 2,
) -> bool:
    """Does ``q`` simulate ``p`` in the bounded game (see ``Simulator``)?"""
    return Simulator(depth, repl_budget, rounds).check(p, q).ok


@dataclass
class SearchResult:
    found: PiProcess | None
    path: list[PiProcess]
    explored: int
    sim: SimResult | None = None

    @property
    def ok(self) -> bool:
        return self.found is not None


def find_simulating(
    source: PiProcess,
    target: PiProcess,
    depth: int,
    repl_budget: int = DEFAULT_BUDGET,
    sim_depth: int = 3,
    rounds: int = 2,
    min_steps: int = 0,
) -> SearchResult:
    """Breadth-first search for ``Q`` reachable from ``source`` in between
    ``min_steps`` and ``depth`` steps such that ``Q`` simulates ``target``;
    the path is shortest. ``min_steps=1`` asks for ``source ->+ Q``."""
    explorer = Explorer(repl_budget)
    sim = Simulator(sim_depth, repl_budget, rounds, explorer)
    start = explorer.norm(source)
    goal = explorer.norm(target)
    parents: dict[str, PiProcess | None] = {key(start): None}
    queue = deque([(start, 0)])
    last: SimResult | None = None
    explored = 0
    while queue:
        q, d = queue.popleft()
        explored += 1
        verdict = sim._sim(goal, q, rounds) if d >= min_steps else None
        if verdict is not None and verdict.ok:
            path = [q]
            while (prev := parents[key(path[-1])]) is not None:
                path.append(prev)
            return SearchResult(q, path[::-1], explored, verdict)
        last = last or verdict
        if d < depth:
            for s in explorer.steps(q):
                ks = key(s)
                if ks not in parents:
                    parents[ks] = q
                    queue.append((s, d + 1))
    return SearchResult(None, [], explored, last)


def simplify(p: PiProcess) -> PiProcess:
    """``cnf`` after renaming binders; convenient for display."""
    return cnf(uniquify(p))


def is_inert(p: PiProcess, repl_budget: int = DEFAULT_BUDGET) -> bool:
    return not barbs(p) and not pi_step(p, repl_budget)


__all__ = [
    "DEFAULT_BUDGET",
    "Explorer",
    "PiRedex",
    "SearchResult",
    "SimResult",
    "Simulator",
    "apply_pi_redex",
    "barb_distance",
    "barbs",
    "bounded_simulates",
    "find_pi_redexes",
    "find_simulating",
    "fold_replicas",
    "is_inert",
    "pi_step",
    "pi_step_tagged",
    "reachable",
    "simplify",
    "weak_barb",
]
