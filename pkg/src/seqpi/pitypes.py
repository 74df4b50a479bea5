"""Interface types for pi processes.

A judgement ``P : Γ ⊢ Δ`` lists the names ``P`` inputs on (Γ) and outputs
on (Δ), each with the type of the data it carries. The rules:

    (0)        0 : Γ ⊢ Δ
    (!)        P : Γ ⊢ Δ                         gives  !P : Γ ⊢ Δ
    (ν)        P : Γ, a:A ⊢ a:A, Δ               gives  new a.P : Γ ⊢ Δ
    (|)        P : Γ ⊢ Δ  and  Q : Γ ⊢ Δ          give   P | Q : Γ ⊢ Δ
    (in)       P : Γ, x:A ⊢ x:A, Δ               gives  a(x).P : Γ, a:A ⊢ Δ
    (out)      a<b> : Γ, b:A ⊢ a:A, b:A, Δ
    (pair-out) a<<b,c>> : Γ, b:A ⊢ a:A→B, c:B, Δ
    (let)      P : Γ, y:B ⊢ x:A, Δ               gives  let <x,y> = z in P : Γ, z:A→B ⊢ Δ

Checking is syntax directed. The type of a restricted name is a
metavariable solved by unification; variables of the given interface are
rigid. Weakening is built in: unused interface entries are accepted.
"""

from __future__ import annotations

from collections.abc import Mapping

from .pisyntax import In, Let, Nil, Out, Pair, Par, PiProcess, Repl, Res, all_names, refresh
from .simpletypes import Arrow, Subst, Type, TypeVarSupply, UnifyError, type_vars, unify
from .xsyntax import FreshSupply
from .xtypes import ContextPair, format_context, parse_context


class PiTypeError(Exception):
    pass


def parse_pi_context(text: str) -> ContextPair:
    """Lines ``in n : T`` (input side) and ``out n : T`` (output side)."""
    return parse_context(text, "in", "out")


def format_pi_context(ctx: ContextPair) -> str:
    return format_context(ctx, "in", "out")


def explain_pi(p: PiProcess, ctx: ContextPair) -> str | None:
    """``None`` if ``P : ctx`` is derivable, otherwise the failing constraint."""
    supply = FreshSupply.after(all_names(p) | set(ctx.gamma) | set(ctx.delta))
    p = refresh(p, supply)
    rigid = frozenset(v for t in list(ctx.gamma.values()) + list(ctx.delta.values()) for v in type_vars(t))
    fresh = TypeVarSupply("?")
    s: Subst = {}

    def eq(a: Type, b: Type, what: str) -> None:
        try:
            unify(a, b, s, rigid)
        except UnifyError as e:
            raise PiTypeError(f"{what}: {e}") from None

    def look(side: Mapping[str, Type], n, where: str, role: str) -> Type:
        if isinstance(n, Pair):
            raise PiTypeError(f"pair {n} in {role} position")
        if n not in side:
            raise PiTypeError(f"{n} missing from the {where} side ({role})")
        return side[n]

    def go(q: PiProcess, gamma: dict[str, Type], delta: dict[str, Type]) -> None:
        match q:
            case Nil():
                return
            case Repl(body):
                go(body, gamma, delta)
            case Par(procs):
                for r in procs:
                    go(r, gamma, delta)
            case Res(a, body):
                t = fresh()
                go(body, {**gamma, a: t}, {**delta, a: t})
            case In(a, x, body):
                t = look(gamma, a, "input", "input channel")
                go(body, {**gamma, x: t}, {**delta, x: t})
            case Out(a, Pair(b, c)):
                ta = look(delta, a, "output", "output channel")
                tb = look(gamma, b, "input", "first pair component")
                tc = look(delta, c, "output", "second pair component")
                eq(ta, Arrow(tb, tc), f"pair output on {a}")
            case Out(a, b):
                ta = look(delta, a, "output", "output channel")
                tb_in = look(gamma, b, "input", "sent name")
                tb_out = look(delta, b, "output", "sent name")
                eq(ta, tb_in, f"output {a}<{b}>")
                eq(tb_in, tb_out, f"sent name {b}")
            case Let(x, y, z, body):
                tz = look(gamma, z, "input", "let scrutinee")
                ta, tb = fresh(), fresh()
                eq(tz, Arrow(ta, tb), f"let scrutinee {z}")
                go(body, {**gamma, y: tb}, {**delta, x: ta})
            case _:
                raise TypeError(f"not a process: {q!r}")

    try:
        go(p, dict(ctx.gamma), dict(ctx.delta))
    except PiTypeError as e:
        return str(e)
    return None


def pi_check(p: PiProcess, ctx: ContextPair) -> bool:
    return explain_pi(p, ctx) is None


def derive_pair_in(a: str, x: str, y: str, p: PiProcess, ctx: ContextPair) -> bool:
    """The derived rule for ``a(<x,y>).P``: ``a:A→B`` on the input side and
    ``P`` checked with ``y:B`` input, ``x:A`` output."""
    t = ctx.gamma.get(a)
    if not isinstance(t, Arrow):
        return False
    return pi_check(p, ContextPair({**ctx.gamma, y: t.right}, {**ctx.delta, x: t.left}))

