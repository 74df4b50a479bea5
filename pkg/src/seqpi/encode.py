"""Encodings X -> pi, lambda -> X and lambda -> pi, and lambda typing.

Fresh names introduced by the encodings use the bases ``o`` (forwarder
variable), ``v``/``d`` (pair components received by an import) and ``w``
(the pair carrier), always with a ``#k`` suffix past every suffix already
in use. They therefore never collide with connectors of the input.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from . import xsyntax as xs
from .pisyntax import In, Let, Out, Pair, Par, PiProcess, Repl, Res, uniquify
from .simpletypes import Arrow, Subst, Type, TypeVarSupply, UnifyError, canonical_renaming, print_type, rename_vars, resolve, unify
from .xsyntax import AnyCut, Capsule, Cut, Export, FreshSupply, Import, XNet


def forwarder(a: str, b: str, supply: FreshSupply | None = None) -> PiProcess:
    """``a(o).b<o>``: everything received on ``a`` is re-sent on ``b``."""
    o = supply.fresh("o") if supply else "o"
    return In(a, o, Out(b, o))


def encode_x(net: XNet, supply: FreshSupply | None = None) -> PiProcess:
    """The process image of ``net``.

    Cuts (plain or activated) are sent to the parallel composition of the
    two ways the cut can be resolved.
    """
    clash = {c.name for c in xs.free_connectors(net) if c.kind is xs.Kind.SOCKET} & xs.free_plugs(net)
    if clash:
        raise ValueError(f"names used both as socket and plug: {sorted(clash)}")
    if supply is None:
        supply = FreshSupply.after(xs.all_names(net))
    net = xs.uniquify(net, supply)

    def fwd(a: str, b: str) -> PiProcess:
        return forwarder(a, b, supply)

    def go(n: XNet) -> PiProcess:
        match n:
            case Capsule(x, a):
                return fwd(x, a)
            case Export(x, body, a, b):
                return Res(x, Res(a, Par(go(body), Out(b, Pair(x, a)))))
            case Import(left, a, y, x, right):
                v, d, w = supply.fresh("v"), supply.fresh("d"), supply.fresh("w")
                inner = Par(
                    Res(a, Repl(Par(go(left), fwd(a, v)))),
                    Res(x, Repl(Par(fwd(d, x), go(right)))),
                )
                return In(y, w, Let(v, d, w, inner))
            case AnyCut(left, a, x, right):
                resolve_left = Res(a, Par(go(left), Repl(Res(x, Par(fwd(a, x), go(right))))))
                resolve_right = Res(x, Par(Res(a, Repl(Par(go(left), fwd(a, x)))), go(right)))
                return Par(resolve_left, resolve_right)
        raise TypeError(f"not a net: {n!r}")

    return uniquify(go(net), supply)


# --------------------------------------------------------------------------
# lambda terms


@dataclass(frozen=True, slots=True)
class Var:
    name: str


@dataclass(frozen=True, slots=True)
class Abs:
    var: str
    body: LamTerm


@dataclass(frozen=True, slots=True)
class App:
    fun: LamTerm
    arg: LamTerm


LamTerm = Union[Var, Abs, App]


def lam_free_vars(m: LamTerm) -> frozenset[str]:
    match m:
        case Var(x):
            return frozenset({x})
        case Abs(x, body):
            return lam_free_vars(body) - {x}
        case App(f, a):
            return lam_free_vars(f) | lam_free_vars(a)
    raise TypeError(f"not a term: {m!r}")


def lam_names(m: LamTerm) -> set[str]:
    match m:
        case Var(x):
            return {x}
        case Abs(x, body):
            return {x} | lam_names(body)
        case App(f, a):
            return lam_names(f) | lam_names(a)
    raise TypeError(f"not a term: {m!r}")


def lam_size(m: LamTerm) -> int:
    match m:
        case Var():
            return 1
        case Abs(_, body):
            return 1 + lam_size(body)
        case App(f, a):
            return 1 + lam_size(f) + lam_size(a)
    raise TypeError(f"not a term: {m!r}")


def lam_uniquify(m: LamTerm, supply: FreshSupply | None = None) -> LamTerm:
    """Rename binders apart from each other and from free variables."""
    if supply is None:
        supply = FreshSupply.after(lam_names(m))
    used = set(lam_free_vars(m))

    def go(t: LamTerm, env: dict[str, str]) -> LamTerm:
        match t:
            case Var(x):
                return Var(env.get(x, x))
            case Abs(x, body):
                y = supply.fresh(xs.base_name(x)) if x in used else x
                used.add(y)
                return Abs(y, go(body, {**env, x: y}))
            case App(f, a):
                return App(go(f, env), go(a, env))
        raise TypeError(f"not a term: {t!r}")

    return go(m, {})


def lam_alpha_key(m: LamTerm, env: dict[str, int] | None = None, depth: int = 0) -> tuple:
    env = env or {}
    match m:
        case Var(x):
            return ("v", env[x]) if x in env else ("f", x)
        case Abs(x, body):
            return ("l", lam_alpha_key(body, {**env, x: depth}, depth + 1))
        case App(f, a):
            return ("a", lam_alpha_key(f, env, depth), lam_alpha_key(a, env, depth))
    raise TypeError(f"not a term: {m!r}")


def lam_subst(m: LamTerm, x: str, n: LamTerm, supply: FreshSupply) -> LamTerm:
    """Capture-avoiding ``m[n/x]``."""
    fv = lam_free_vars(n)

    def go(t: LamTerm) -> LamTerm:
        match t:
            case Var(y):
                return n if y == x else t
            case Abs(y, body):
                if y == x or x not in lam_free_vars(body):
                    return t
                if y in fv:
                    z = supply.fresh(xs.base_name(y))
                    body = lam_rename(body, y, z)
                    y = z
                return Abs(y, go(body))
            case App(f, a):
                return App(go(f), go(a))
        raise TypeError(f"not a term: {t!r}")

    return go(m)


def lam_rename(m: LamTerm, old: str, new: str) -> LamTerm:
    match m:
        case Var(x):
            return Var(new) if x == old else m
        case Abs(x, body):
            return m if x == old else Abs(x, lam_rename(body, old, new))
        case App(f, a):
            return App(lam_rename(f, old, new), lam_rename(a, old, new))
    raise TypeError(f"not a term: {m!r}")


def beta_steps(m: LamTerm, supply: FreshSupply | None = None) -> list[LamTerm]:
    """All one-step beta reducts, leftmost-outermost redex first."""
    if supply is None:
        supply = FreshSupply.after(lam_names(m))
    out: list[LamTerm] = []
    match m:
        case App(Abs(x, body), a):
            out.append(lam_uniquify(lam_subst(body, x, a, supply), supply))
    match m:
        case Abs(x, body):
            out += [Abs(x, b) for b in beta_steps(body, supply)]
        case App(f, a):
            out += [App(g, a) for g in beta_steps(f, supply)]
            out += [App(f, b) for b in beta_steps(a, supply)]
    return out


class LamSyntaxError(ValueError):
    pass


_LTOK = re.compile(r"\s*(?:(?P<id>[A-Za-z_][A-Za-z0-9_']*(?:#[0-9]+)?)|(?P<sym>[\\λ.()]))")


def parse_lam(text: str) -> LamTerm:
    r"""``M ::= x | \x y. M | M M | (M)``; ``λ`` may replace ``\``."""
    tokens: list[tuple[str, str, int]] = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _LTOK.match(text, pos)
        if not m:
            raise LamSyntaxError(f"unexpected character {text[pos]!r} at column {pos + 1}")
        tokens.append((m.lastgroup, m.group(m.lastgroup), m.start(m.lastgroup)))
        pos = m.end()
    i = 0

    def peek():
        return tokens[i] if i < len(tokens) else None

    def fail(msg: str):
        tok = peek()
        col = tok[2] + 1 if tok else len(text) + 1
        raise LamSyntaxError(f"column {col}: {msg}")

    def term() -> LamTerm:
        nonlocal i
        tok = peek()
        if tok and tok[1] in ("\\", "λ"):
            i += 1
            names = []
            while (tok := peek()) and tok[0] == "id":
                names.append(tok[1])
                i += 1
            if not names:
                fail("expected a variable after lambda")
            if not (tok and tok[1] == "."):
                fail("expected '.'")
            i += 1
            body = term()
            for x in reversed(names):
                body = Abs(x, body)
            return body
        fun = atom()
        while (tok := peek()) and (tok[0] == "id" or tok[1] in ("(", "\\", "λ")):
            if tok[1] in ("\\", "λ"):
                fun = App(fun, term())
                break
            fun = App(fun, atom())
        return fun

    def atom() -> LamTerm:
        nonlocal i
        tok = peek()
        if tok is None:
            fail("unexpected end of input")
        if tok[0] == "id":
            i += 1
            return Var(tok[1])
        if tok[1] == "(":
            i += 1
            t = term()
            if not (peek() and peek()[1] == ")"):
                fail("expected ')'")
            i += 1
            return t
        fail(f"unexpected {tok[1]!r}")

    t = term()
    if peek() is not None:
        fail("trailing input")
    return t


def print_lam(m: LamTerm) -> str:
    match m:
        case Var(x):
            return x
        case Abs(x, body):
            return f"\\{x}. {print_lam(body)}"
        case App(f, a):
            left = f"({print_lam(f)})" if isinstance(f, Abs) else print_lam(f)
            right = f"({print_lam(a)})" if isinstance(a, (Abs, App)) else print_lam(a)
            return f"{left} {right}"
    raise TypeError(f"not a term: {m!r}")


class LamUntypeable(Exception):
    pass


def infer_lam(m: LamTerm) -> tuple[dict[str, Type], Type]:
    """Principal pair: environment for the free variables and result type."""
    return _infer_lam(lam_uniquify(m), None)


def _infer_lam(m: LamTerm, record: list | None) -> tuple[dict[str, Type], Type]:
    fresh = TypeVarSupply()
    s: Subst = {}

    def go(t: LamTerm, env: dict[str, Type], depth: int = 0) -> Type:
        if record is None:
            return rule(t, env, depth)
        slot = len(record)
        record.append(None)
        ty = rule(t, env, depth)
        record[slot] = (depth, t, env, ty)
        return ty

    def rule(t: LamTerm, env: dict[str, Type], depth: int) -> Type:
        match t:
            case Var(x):
                if x not in env:
                    env[x] = fresh()
                return env[x]
            case Abs(x, body):
                a = fresh()
                inner = dict(env)
                inner[x] = a
                b = go(body, inner, depth + 1)
                for k, v in inner.items():
                    if k != x:
                        env.setdefault(k, v)
                return Arrow(a, b)
            case App(f, a):
                tf = go(f, env, depth + 1)
                ta = go(a, env, depth + 1)
                r = fresh()
                unify(tf, Arrow(ta, r), s)
                return r
        raise TypeError(f"not a term: {t!r}")

    env: dict[str, Type] = {}
    try:
        ty = go(m, env)
    except UnifyError as e:
        raise LamUntypeable(f"{type(e).__name__}: {e}") from None
    if record is not None:
        record[:] = [
            (depth, t, {k: resolve(v, s) for k, v in e.items() if k in lam_free_vars(t)}, resolve(u, s))
            for depth, t, e, u in record
        ]
    gamma = {k: resolve(v, s) for k, v in env.items() if k in lam_free_vars(m)}
    return gamma, resolve(ty, s)


def pretty_lam_typing(gamma: dict[str, Type], ty: Type) -> tuple[dict[str, Type], Type]:
    order = [gamma[k] for k in sorted(gamma)] + [ty]
    mapping = canonical_renaming(order)
    return {k: rename_vars(v, mapping) for k, v in gamma.items()}, rename_vars(ty, mapping)


def derivation_lam(m: LamTerm) -> list[str]:
    """A principal derivation, one judgement per line, premises indented."""
    record: list = []
    _infer_lam(lam_uniquify(m), record)
    types = [t for _, _, env, ty in record for t in [*(env[k] for k in sorted(env)), ty]]
    mapping = canonical_renaming(types)
    lines = []
    for depth, t, env, ty in record:
        left = ", ".join(f"{k} : {print_type(rename_vars(env[k], mapping))}" for k in sorted(env))
        rule = {Var: "var", Abs: "abs", App: "app"}[type(t)]
        judgement = f"{left} |- {print_lam(t)} : {print_type(rename_vars(ty, mapping))}".strip()
        lines.append(f"{'  ' * depth}({rule}) {judgement}")
    return lines


def encode_lam_to_x(m: LamTerm, plug: str = "a", supply: FreshSupply | None = None) -> XNet:
    """The net of ``m`` whose single free plug is ``plug``."""
    if plug in lam_names(m):
        raise ValueError(f"plug {plug!r} clashes with a variable of the term")
    if supply is None:
        supply = FreshSupply.after(lam_names(m) | {plug})
    m = lam_uniquify(m, supply)

    def go(t: LamTerm, a: str) -> XNet:
        match t:
            case Var(x):
                return Capsule(x, a)
            case Abs(x, body):
                b = supply.fresh("b")
                return Export(x, go(body, b), b, a)
            case App(f, arg):
                g, b = supply.fresh("g"), supply.fresh("b")
                x, y = supply.fresh("x"), supply.fresh("y")
                return Cut(go(f, g), g, x, Import(go(arg, b), b, x, y, Capsule(y, a)))
        raise TypeError(f"not a term: {t!r}")

    return go(m, plug)


def encode_lam_to_pi(m: LamTerm, plug: str = "a", supply: FreshSupply | None = None) -> PiProcess:
    if supply is None:
        supply = FreshSupply.after(lam_names(m) | {plug})
    return encode_x(encode_lam_to_x(m, plug, supply), supply)
