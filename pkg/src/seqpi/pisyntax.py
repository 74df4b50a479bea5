"""The asynchronous pi-calculus with pairing: terms, substitution, congruence."""

from __future__ import annotations

import re
from collections.abc import Iterator, Mapping
from dataclasses import dataclass
from typing import Union

from .xsyntax import FreshSupply


@dataclass(frozen=True, slots=True)
class Pair:
    """A pair datum. Components are names; a pair component only arises
    from substitution and marks a stuck term."""

    left: Datum
    right: Datum


Datum = Union[str, Pair]


@dataclass(frozen=True, slots=True)
class Nil:
    pass


@dataclass(frozen=True, slots=True, init=False)
class Par:
    procs: tuple[PiProcess, ...]

    def __init__(self, *procs: PiProcess) -> None:
        object.__setattr__(self, "procs", tuple(procs))


@dataclass(frozen=True, slots=True)
class Repl:
    body: PiProcess


@dataclass(frozen=True, slots=True)
class Res:
    name: str
    body: PiProcess


@dataclass(frozen=True, slots=True)
class In:
    chan: Datum
    var: str
    body: PiProcess


@dataclass(frozen=True, slots=True)
class Out:
    chan: Datum
    datum: Datum


@dataclass(frozen=True, slots=True)
class Let:
    """``let <x, y> = z in body``"""

    x: str
    y: str
    scrutinee: Datum
    body: PiProcess


PiProcess = Union[Nil, Par, Repl, Res, In, Out, Let]
NIL = Nil()


def par(*procs: PiProcess) -> PiProcess:
    """Parallel composition that avoids trivial wrappers."""
    procs = tuple(p for p in procs if not isinstance(p, Nil))
    if not procs:
        return NIL
    return procs[0] if len(procs) == 1 else Par(*procs)


def res(names, body: PiProcess) -> PiProcess:
    for n in reversed(list(names)):
        body = Res(n, body)
    return body


def pair_in(chan: str, x: str, y: str, body: PiProcess, w: str) -> In:
    """The abbreviation ``chan(<x,y>).body`` with carrier variable ``w``."""
    return In(chan, w, Let(x, y, w, body))


# --------------------------------------------------------------------------
# names


def datum_names(d: Datum) -> Iterator[str]:
    if isinstance(d, Pair):
        yield from datum_names(d.left)
        yield from datum_names(d.right)
    else:
        yield d


def free_names(p: PiProcess) -> frozenset[str]:
    match p:
        case Nil():
            return frozenset()
        case Par(procs):
            return frozenset().union(*map(free_names, procs))
        case Repl(body):
            return free_names(body)
        case Res(n, body):
            return free_names(body) - {n}
        case In(a, x, body):
            return frozenset(datum_names(a)) | (free_names(body) - {x})
        case Out(a, d):
            return frozenset(datum_names(a)) | frozenset(datum_names(d))
        case Let(x, y, z, body):
            return frozenset(datum_names(z)) | (free_names(body) - {x, y})
    raise TypeError(f"not a process: {p!r}")


def all_names(p: PiProcess) -> set[str]:
    out: set[str] = set()

    def go(q: PiProcess) -> None:
        match q:
            case Par(procs):
                for r in procs:
                    go(r)
            case Repl(body):
                go(body)
            case Res(n, body):
                out.add(n)
                go(body)
            case In(a, x, body):
                out.update(datum_names(a))
                out.add(x)
                go(body)
            case Out(a, d):
                out.update(datum_names(a))
                out.update(datum_names(d))
            case Let(x, y, z, body):
                out.update((x, y))
                out.update(datum_names(z))
                go(body)

    go(p)
    return out


def size(p: PiProcess) -> int:
    """Number of constructors (``Par`` counts as n-1 binary nodes)."""
    match p:
        case Nil() | Out():
            return 1
        case Par(procs):
            return sum(map(size, procs)) + len(procs) - 1
        case Repl(body) | Res(_, body) | In(_, _, body) | Let(_, _, _, body):
            return 1 + size(body)
    raise TypeError(f"not a process: {p!r}")


def is_stuck(p: PiProcess) -> bool:
    """Does ``p`` contain a pair in subject position or a nested pair?"""

    def bad(d: Datum, subject: bool) -> bool:
        if isinstance(d, Pair):
            return subject or isinstance(d.left, Pair) or isinstance(d.right, Pair)
        return False

    match p:
        case Nil():
            return False
        case Par(procs):
            return any(map(is_stuck, procs))
        case Repl(body) | Res(_, body):
            return is_stuck(body)
        case In(a, _, body):
            return bad(a, True) or is_stuck(body)
        case Out(a, d):
            return bad(a, True) or bad(d, False)
        case Let(_, _, z, body):
            return bad(z, False) or is_stuck(body)
    raise TypeError(f"not a process: {p!r}")


# --------------------------------------------------------------------------
# substitution and renaming


def _sub_datum(d: Datum, sigma: Mapping[str, Datum]) -> Datum:
    if isinstance(d, Pair):
        return Pair(_sub_datum(d.left, sigma), _sub_datum(d.right, sigma))
    return sigma.get(d, d)


def substitute(p: PiProcess, sigma: Mapping[str, Datum], supply: FreshSupply | None = None) -> PiProcess:
    """Simultaneous capture-avoiding substitution of data for names.

    A pair substituted into subject position or into a pair component is
    kept as is, which makes the term stuck (see ``is_stuck``).
    """
    if not sigma:
        return p
    if supply is None:
        supply = FreshSupply.after(all_names(p) | {n for d in sigma.values() for n in datum_names(d)} | set(sigma))

    def bind(names: tuple[str, ...], sig: Mapping[str, Datum], body: PiProcess):
        sig = {k: v for k, v in sig.items() if k not in names}
        if not sig:
            return names, sig, body
        live = set()
        fn_body = free_names(body)
        for k, v in sig.items():
            if k in fn_body:
                live.update(datum_names(v))
        new_names = []
        renaming: dict[str, Datum] = {}
        for n in names:
            if n in live:
                m = supply.fresh(n.split("#")[0])
                renaming[n] = m
                new_names.append(m)
            else:
                new_names.append(n)
        if renaming:
            body = substitute(body, renaming, supply)
        return tuple(new_names), sig, body

    def go(q: PiProcess, sig: Mapping[str, Datum]) -> PiProcess:
        if not sig:
            return q
        match q:
            case Nil():
                return q
            case Par(procs):
                return Par(*(go(r, sig) for r in procs))
            case Repl(body):
                return Repl(go(body, sig))
            case Res(n, body):
                (n,), sig2, body = bind((n,), sig, body)
                return Res(n, go(body, sig2))
            case In(a, x, body):
                a = _sub_datum(a, sig)
                (x,), sig2, body = bind((x,), sig, body)
                return In(a, x, go(body, sig2))
            case Out(a, d):
                return Out(_sub_datum(a, sig), _sub_datum(d, sig))
            case Let(x, y, z, body):
                z = _sub_datum(z, sig)
                (x, y), sig2, body = bind((x, y), sig, body)
                return Let(x, y, z, go(body, sig2))
        raise TypeError(f"not a process: {q!r}")

    return go(p, dict(sigma))


def subst_data(p: PiProcess, x: str, d: Datum, supply: FreshSupply | None = None) -> PiProcess:
    """``p[d/x]``"""
    return substitute(p, {x: d}, supply)


def uniquify(p: PiProcess, supply: FreshSupply | None = None) -> PiProcess:
    """Rename binders so that they are pairwise distinct and distinct from
    the free names; binders already satisfying this keep their name."""
    if supply is None:
        supply = FreshSupply.after(all_names(p))
    used = set(free_names(p))

    def claim(n: str) -> str:
        if n in used:
            n = supply.fresh(n.split("#")[0])
        used.add(n)
        return n

    def go(q: PiProcess, env: Mapping[str, str]) -> PiProcess:
        match q:
            case Nil():
                return q
            case Par(procs):
                return Par(*(go(r, env) for r in procs))
            case Repl(body):
                return Repl(go(body, env))
            case Res(n, body):
                m = claim(n)
                return Res(m, go(body, {**env, n: m}))
            case In(a, x, body):
                m = claim(x)
                return In(_sub_datum(a, env), m, go(body, {**env, x: m}))
            case Out(a, d):
                return Out(_sub_datum(a, env), _sub_datum(d, env))
            case Let(x, y, z, body):
                mx, my = claim(x), claim(y)
                return Let(mx, my, _sub_datum(z, env), go(body, {**env, x: mx, y: my}))
        raise TypeError(f"not a process: {q!r}")

    return go(p, {})


def refresh(p: PiProcess, supply: FreshSupply) -> PiProcess:
    """Rename every binder to a fresh name."""

    def go(q: PiProcess, env: Mapping[str, str]) -> PiProcess:
        match q:
            case Nil():
                return q
            case Par(procs):
                return Par(*(go(r, env) for r in procs))
            case Repl(body):
                return Repl(go(body, env))
            case Res(n, body):
                m = supply.fresh(n.split("#")[0])
                return Res(m, go(body, {**env, n: m}))
            case In(a, x, body):
                m = supply.fresh(x.split("#")[0])
                return In(_sub_datum(a, env), m, go(body, {**env, x: m}))
            case Out(a, d):
                return Out(_sub_datum(a, env), _sub_datum(d, env))
            case Let(x, y, z, body):
                mx, my = supply.fresh(x.split("#")[0]), supply.fresh(y.split("#")[0])
                return Let(mx, my, _sub_datum(z, env), go(body, {**env, x: mx, y: my}))
        raise TypeError(f"not a process: {q!r}")

    return go(p, {})


def rename_free(p: PiProcess, mapping: Mapping[str, str]) -> PiProcess:
    return substitute(p, dict(mapping))


# --------------------------------------------------------------------------
# congruence normal form


def components(p: PiProcess) -> tuple[PiProcess, ...]:
    match p:
        case Nil():
            return ()
        case Par(procs):
            return procs
    return (p,)


def cnf(p: PiProcess) -> PiProcess:
    """Congruence normal form.

    Parallel compositions are flattened, sorted and stripped of ``0``;
    restrictions are pushed inward as far as scope allows and dropped when
    unused; ``let`` on a literal pair is replaced by substitution.
    Replication is left alone.
    """
    return _canon(_cnf(uniquify(p)), {}, 0)[0]


def _cnf(p: PiProcess) -> PiProcess:
    match p:
        case Nil() | Out():
            return p
        case Par(procs):
            flat: list[PiProcess] = []
            for q in procs:
                flat.extend(components(_cnf(q)))
            return _sorted_par(flat)
        case Repl(body):
            return Repl(_cnf(body))
        case In(a, x, body):
            return In(a, x, _cnf(body))
        case Let(x, y, Pair(l, r), body):
            return _cnf(substitute(body, {x: l, y: r}))
        case Let(x, y, z, body):
            return Let(x, y, z, _cnf(body))
        case Res():
            names: list[str] = []
            while isinstance(p, Res):
                names.append(p.name)
                p = p.body
            return _block(names, list(components(_cnf(p))))
    raise TypeError(f"not a process: {p!r}")


def _sorted_par(procs: list[PiProcess]) -> PiProcess:
    # components are put in canonical order by the final ``_canon`` pass
    procs = [q for q in procs if not isinstance(q, Nil)]
    if not procs:
        return NIL
    if len(procs) == 1:
        return procs[0]
    return Par(*procs)


def _block(names: list[str], comps: list[PiProcess]) -> PiProcess:
    """Place the restrictions ``names`` over the (normalised) parallel
    components ``comps`` with every restriction as low as possible."""
    pool: list[PiProcess] = []
    names = list(names)
    stack = list(comps)
    while stack:
        c = stack.pop(0)
        if isinstance(c, Res):
            while isinstance(c, Res):
                names.append(c.name)
                c = c.body
            stack[:0] = list(components(c))
        elif not isinstance(c, Nil):
            pool.append(c)
    return _group(names, pool)


def _group(names: list[str], pool: list[PiProcess]) -> PiProcess:
    fns = [free_names(c) for c in pool]
    names = [n for n in names if any(n in f for f in fns)]
    if not names:
        return _sorted_par(pool)
    if len(pool) == 1:
        return res(names, pool[0])
    occurrences = {n: [i for i, f in enumerate(fns) if n in f] for n in names}
    local = [n for n in names if len(occurrences[n]) == 1]
    if local:
        pushed = list(pool)
        for i in sorted({occurrences[n][0] for n in local}):
            pushed[i] = res([n for n in local if occurrences[n][0] == i], pool[i])
        return _group([n for n in names if n not in local], pushed)
    # connected groups through shared restricted names
    parent = list(range(len(pool)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for n in names:
        first, *rest = occurrences[n]
        for j in rest:
            parent[find(j)] = find(first)
    groups: dict[int, list[int]] = {}
    for i in range(len(pool)):
        groups.setdefault(find(i), []).append(i)
    out: list[PiProcess] = []
    for members in groups.values():
        mine = [n for n in names if find(occurrences[n][0]) == find(members[0])]
        body = _sorted_par([pool[i] for i in members])
        out.append(res(mine, body) if mine else body)
    return _sorted_par(out)


# --------------------------------------------------------------------------
# canonical keys


def _dkey(d: Datum, env: Mapping[str, str]) -> str:
    if isinstance(d, Pair):
        return f"<{_dkey(d.left, env)},{_dkey(d.right, env)}>"
    return env.get(d, d)


def key(p: PiProcess) -> str:
    """Canonical string of ``p`` up to alpha, order of parallel components
    and order of adjacent restrictions. Meaningful on ``cnf`` output.

    Adjacent restrictions are ordered by a signature of each name: the key of
    the body with that name marked and the chain's other names hidden. Ties
    keep source order, so equal keys imply congruence but a few congruent
    pairs may get different keys.
    """
    hit = _KEYS.get(id(p))
    if hit is not None and hit[0] is p:
        return hit[1]
    if len(_KEYS) >= _KEYS_LIMIT:
        _KEYS.clear()
    k = _canon(p, {}, 0)[1]
    # the entry holds p, so its id cannot be reused while cached
    _KEYS[id(p)] = (p, k)
    return k


_KEYS: dict[int, tuple[PiProcess, str]] = {}
_KEYS_LIMIT = 50_000


def _canon(p: PiProcess, env: Mapping[str, str], depth: int) -> tuple[PiProcess, str]:
    """``p`` with parallel components and restriction chains in canonical
    order, together with its key."""
    match p:
        case Nil():
            return p, "0"
        case Out(a, d):
            return p, f"{_dkey(a, env)}<{_dkey(d, env)}>"
        case Par(procs):
            done = sorted((_canon(q, env, depth) for q in procs), key=lambda pair: pair[1])
            return Par(*(q for q, _ in done)), "(" + "|".join(k for _, k in done) + ")"
        case Repl(body):
            q, k = _canon(body, env, depth)
            return Repl(q), "!" + k
        case In(a, x, body):
            v = f"%{depth}"
            q, k = _canon(body, {**env, x: v}, depth + 1)
            return In(a, x, q), f"{_dkey(a, env)}({v})." + k
        case Let(x, y, z, body):
            vx, vy = f"%{depth}", f"%{depth + 1}"
            q, k = _canon(body, {**env, x: vx, y: vy}, depth + 2)
            return Let(x, y, z, q), f"let<{vx},{vy}>={_dkey(z, env)}." + k
        case Res():
            names: list[str] = []
            while isinstance(p, Res):
                names.append(p.name)
                p = p.body
            if len(names) > 1:
                # order of first occurrence in the body's rough key
                seen: list[str] = []
                _rough(p, {**env, **{n: "?" for n in names}}, depth, set(names), seen)
                rank = {n: i for i, n in enumerate(dict.fromkeys(seen))}
                names.sort(key=lambda n: rank.get(n, len(rank)))
            inner = dict(env)
            for i, n in enumerate(names):
                inner[n] = f"%{depth + i}"
            q, k = _canon(p, inner, depth + len(names))
            return res(names, q), f"new{len(names)}." + k
    raise TypeError(f"not a process: {p!r}")


def _rough(p: PiProcess, env: Mapping[str, str], depth: int, track: set[str], seen: list[str]) -> str:
    """Like the key, but nested restriction chains hide all their names.
    Occurrences of the names in ``track`` are appended to ``seen`` in the
    order the rough key mentions them."""

    def d(x: Datum, out: list[str]) -> str:
        for n in datum_names(x):
            if n in track:
                out.append(n)
        return _dkey(x, env)

    match p:
        case Nil():
            return "0"
        case Out(a, x):
            return f"{d(a, seen)}<{d(x, seen)}>"
        case Par(procs):
            parts = []
            for q in procs:
                mine: list[str] = []
                parts.append((_rough(q, env, depth, track, mine), mine))
            parts.sort(key=lambda part: part[0])
            for _, mine in parts:
                seen.extend(mine)
            return "(" + "|".join(k for k, _ in parts) + ")"
        case Repl(body):
            return "!" + _rough(body, env, depth, track, seen)
        case In(a, x, body):
            v = f"%{depth}"
            head = f"{d(a, seen)}({v})."
            return head + _rough(body, {**env, x: v}, depth + 1, track - {x}, seen)
        case Let(x, y, z, body):
            vx, vy = f"%{depth}", f"%{depth + 1}"
            head = f"let<{vx},{vy}>={d(z, seen)}."
            return head + _rough(body, {**env, x: vx, y: vy}, depth + 2, track - {x, y}, seen)
        case Res():
            names: list[str] = []
            while isinstance(p, Res):
                names.append(p.name)
                p = p.body
            inner = {**env, **{n: "?" for n in names}}
            return f"new{len(names)}." + _rough(p, inner, depth, track - set(names), seen)
    raise TypeError(f"not a process: {p!r}")


def struct_eq(p: PiProcess, q: PiProcess) -> bool:
    """Structural congruence without replication unfolding (sound, incomplete)."""
    return key(cnf(p)) == key(cnf(q))


def alpha_eq(p: PiProcess, q: PiProcess) -> bool:
    return _alpha(p, {}, 0) == _alpha(q, {}, 0)


def _alpha(p: PiProcess, env: Mapping[str, str], depth: int) -> str:
    match p:
        case Nil():
            return "0"
        case Out(a, d):
            return f"{_dkey(a, env)}<{_dkey(d, env)}>"
        case Par(procs):
            return "(" + "|".join(_alpha(q, env, depth) for q in procs) + ")"
        case Repl(body):
            return "!" + _alpha(body, env, depth)
        case Res(n, body):
            v = f"%{depth}"
            return f"new {v}." + _alpha(body, {**env, n: v}, depth + 1)
        case In(a, x, body):
            v = f"%{depth}"
            return f"{_dkey(a, env)}({v})." + _alpha(body, {**env, x: v}, depth + 1)
        case Let(x, y, z, body):
            vx, vy = f"%{depth}", f"%{depth + 1}"
            return f"let<{vx},{vy}>={_dkey(z, env)}." + _alpha(body, {**env, x: vx, y: vy}, depth + 2)
    raise TypeError(f"not a process: {p!r}")


# --------------------------------------------------------------------------
# concrete syntax


class PiSyntaxError(ValueError):
    def __init__(self, message: str, text: str, pos: int) -> None:
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{line}:{col}: {message}")
        self.line, self.column = line, col


_PI_TOKEN = re.compile(r"\s*(?:(?P<id>[A-Za-z_][A-Za-z0-9_']*(?:#[0-9]+)?)|(?P<nil>0)|(?P<sym>[()<>|!.,=]))")


class _PiParser:
    def __init__(self, text: str, supply: FreshSupply) -> None:
        self.text = text
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while True:
            while pos < len(text) and text[pos].isspace():
                pos += 1
            if pos >= len(text):
                break
            m = _PI_TOKEN.match(text, pos)
            if not m:
                raise PiSyntaxError(f"unexpected character {text[pos]!r}", text, pos)
            kind = m.lastgroup
            self.tokens.append((kind, m.group(kind), m.start(kind)))
            pos = m.end()
        self.i = 0
        self.supply = supply

    def peek(self, k: int = 0) -> tuple[str, str, int] | None:
        j = self.i + k
        return self.tokens[j] if j < len(self.tokens) else None

    def error(self, msg: str):
        tok = self.peek()
        raise PiSyntaxError(msg, self.text, tok[2] if tok else len(self.text))

    def sym(self, s: str) -> None:
        tok = self.peek()
        if tok is None or tok[1] != s or tok[0] != "sym":
            self.error(f"expected {s!r}")
        self.i += 1

    def at(self, s: str, k: int = 0) -> bool:
        tok = self.peek(k)
        return tok is not None and tok[0] == "sym" and tok[1] == s

    def name(self) -> str:
        tok = self.peek()
        if tok is None or tok[0] != "id":
            self.error("expected a name")
        self.i += 1
        return tok[1]

    def datum(self) -> Datum:
        if self.at("<"):
            self.sym("<")
            left = self.datum()
            self.sym(",")
            right = self.datum()
            self.sym(">")
            return Pair(left, right)
        return self.name()

    def process(self) -> PiProcess:
        procs = [self.prefix()]
        while self.at("|"):
            self.i += 1
            procs.append(self.prefix())
        return procs[0] if len(procs) == 1 else Par(*procs)

    def prefix(self) -> PiProcess:
        tok = self.peek()
        if tok is None:
            self.error("unexpected end of input")
        kind, val, _ = tok
        if kind == "nil":
            self.i += 1
            return NIL
        if kind == "sym":
            if val == "!":
                self.i += 1
                return Repl(self.prefix())
            if val == "(":
                self.i += 1
                p = self.process()
                self.sym(")")
                return p
            if val == "<":
                return self.action(self.datum())
            self.error(f"unexpected {val!r}")
        if val == "new" and self._is_id(1) and self.at(".", 2):
            self.i += 1
            n = self.name()
            self.sym(".")
            return Res(n, self.prefix())
        if val == "let" and self.at("<", 1):
            self.i += 1
            self.sym("<")
            x = self.name()
            self.sym(",")
            y = self.name()
            self.sym(">")
            self.sym("=")
            z = self.datum()
            tok = self.peek()
            if tok is None or tok[1] != "in":
                self.error("expected 'in'")
            self.i += 1
            return Let(x, y, z, self.prefix())
        if val == "out" and self._is_id(1):
            self.i += 1
        return self.action(self.datum())

    def _is_id(self, k: int) -> bool:
        tok = self.peek(k)
        return tok is not None and tok[0] == "id"

    def action(self, chan: Datum) -> PiProcess:
        if self.at("<"):
            self.sym("<")
            d = self.datum()
            self.sym(">")
            return Out(chan, d)
        if self.at("("):
            self.sym("(")
            if self.at("<"):
                self.sym("<")
                x = self.name()
                self.sym(",")
                y = self.name()
                self.sym(">")
                self.sym(")")
                self.sym(".")
                body = self.prefix()
                w = self.supply.fresh("w")
                return pair_in(chan, x, y, body, w)
            x = self.name()
            self.sym(")")
            self.sym(".")
            return In(chan, x, self.prefix())
        self.error("expected '<' or '(' after channel")


def parse_pi(text: str) -> PiProcess:
    """Parse a process; prefixes bind tighter than ``|``."""
    names = set(re.findall(r"[A-Za-z_][A-Za-z0-9_']*(?:#[0-9]+)?", text))
    parser = _PiParser(text, FreshSupply.after(names))
    p = parser.process()
    if parser.peek() is not None:
        parser.error("trailing input")
    return p


def print_datum(d: Datum) -> str:
    if isinstance(d, Pair):
        return f"<{print_datum(d.left)},{print_datum(d.right)}>"
    return d


def print_pi(p: PiProcess) -> str:
    match p:
        case Nil():
            return "0"
        case Par(procs):
            return " | ".join(map(print_pi, procs))
        case Repl(body):
            return "!" + _atom(body)
        case Res(n, body):
            return f"new {n}.{_atom(body)}"
        case In(a, w, Let(x, y, z, body)) if z == w and w not in free_names(body):
            return f"{print_datum(a)}(<{x},{y}>).{_atom(body)}"
        case In(a, x, body):
            return f"{print_datum(a)}({x}).{_atom(body)}"
        case Out(a, d):
            return f"{print_datum(a)}<{print_datum(d)}>"
        case Let(x, y, z, body):
            return f"let <{x},{y}> = {print_datum(z)} in {_atom(body)}"
    raise TypeError(f"not a process: {p!r}")


def _atom(p: PiProcess) -> str:
    return f"({print_pi(p)})" if isinstance(p, Par) else print_pi(p)
