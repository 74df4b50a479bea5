"""Principal typing for X nets.

A judgement ``P : Γ ⊢ Δ`` assigns types to the free sockets (Γ) and free
plugs (Δ) of ``P``. The rules:

    cap   Γ, x:A ⊢ a:A, Δ
    exp   P : Γ, x:A ⊢ a:B, Δ                       gives  Γ ⊢ b:A→B, Δ
    imp   P : Γ ⊢ a:A, Δ   and  Q : Γ, x:B ⊢ Δ        give   Γ, y:A→B ⊢ Δ
    cut   P : Γ ⊢ a:A, Δ   and  Q : Γ, x:A ⊢ Δ        give   Γ ⊢ Δ

Activated cuts are typed like plain cuts.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field

from .simpletypes import (
    Arrow,
    Subst,
    Type,
    TypeSyntaxError,
    TypeVarSupply,
    UnifyError,
    canonical_renaming,
    match_type,
    normalize,
    parse_type,
    print_type,
    rename_vars,
    resolve,
    unify,
)
from .xsyntax import (
    CUT_KEYWORDS,
    AnyCut,
    Capsule,
    Export,
    FreshSupply,
    Import,
    XNet,
    all_names,
    free_plugs,
    free_sockets,
    is_barendregt,
    refresh,
)


class Untypeable(Exception):
    pass


@dataclass(frozen=True)
class ContextPair:
    """Socket context ``gamma`` and plug context ``delta``."""

    gamma: Mapping[str, Type] = field(default_factory=dict)
    delta: Mapping[str, Type] = field(default_factory=dict)

    def types(self) -> list[Type]:
        return [self.gamma[k] for k in sorted(self.gamma)] + [self.delta[k] for k in sorted(self.delta)]

    def renamed_vars(self, mapping: Mapping[str, str]) -> ContextPair:
        return ContextPair(
            {k: rename_vars(t, mapping) for k, t in self.gamma.items()},
            {k: rename_vars(t, mapping) for k, t in self.delta.items()},
        )

    def pretty(self) -> ContextPair:
        """Type variables renamed to A, B, ... by first appearance."""
        return self.renamed_vars(canonical_renaming(self.types()))

    def __str__(self) -> str:
        return format_sequent(self.gamma, self.delta)


def format_sequent(gamma: Mapping[str, Type], delta: Mapping[str, Type]) -> str:
    left = ", ".join(f"{k} : {print_type(gamma[k])}" for k in sorted(gamma))
    right = ", ".join(f"{k} : {print_type(delta[k])}" for k in sorted(delta))
    return f"{left} |- {right}".strip()


def _merge(target: dict[str, Type], extra: Mapping[str, Type], s: Subst) -> None:
    for k, t in extra.items():
        if k in target:
            unify(target[k], t, s)
        else:
            target[k] = t


def infer_x(net: XNet) -> tuple[ContextPair, Subst]:
    """Principal contexts of ``net`` (after refreshing its binders).

    Raises ``Untypeable`` naming the constraint that failed.
    """
    return _infer(refresh(net, FreshSupply.after(all_names(net))), None)


_RULE_NAMES = {Capsule: "cap", Export: "exp", Import: "imp"}


def _infer(net: XNet, record: list | None) -> tuple[ContextPair, Subst]:
    fresh = TypeVarSupply()
    s: Subst = {}

    def go(n: XNet, depth: int = 0) -> tuple[dict[str, Type], dict[str, Type]]:
        if record is None:
            return rule(n, depth)
        slot = len(record)
        record.append(None)
        g, d = rule(n, depth)
        record[slot] = (depth, n, dict(g), dict(d))
        return g, d

    def rule(n: XNet, depth: int) -> tuple[dict[str, Type], dict[str, Type]]:
        try:
            match n:
                case Capsule(x, a):
                    t = fresh()
                    return {x: t}, {a: t}
                case Export(x, body, a, b):
                    g, d = go(body, depth + 1)
                    arrow = Arrow(g.pop(x, None) or fresh(), d.pop(a, None) or fresh())
                    _merge(d, {b: arrow}, s)
                    return g, d
                case Import(left, a, y, x, right):
                    g1, d1 = go(left, depth + 1)
                    g2, d2 = go(right, depth + 1)
                    arrow = Arrow(d1.pop(a, None) or fresh(), g2.pop(x, None) or fresh())
                    _merge(g1, g2, s)
                    _merge(d1, d2, s)
                    _merge(g1, {y: arrow}, s)
                    return g1, d1
                case AnyCut(left, a, x, right):
                    g1, d1 = go(left, depth + 1)
                    g2, d2 = go(right, depth + 1)
                    unify(d1.pop(a, None) or fresh(), g2.pop(x, None) or fresh(), s)
                    _merge(g1, g2, s)
                    _merge(d1, d2, s)
                    return g1, d1
        except UnifyError as e:
            raise Untypeable(f"{type(e).__name__}: {e}") from None
        raise TypeError(f"not a net: {n!r}")

    gamma, delta = go(net)
    if record is not None:
        record[:] = [(depth, n, _resolved(g, s), _resolved(d, s)) for depth, n, g, d in record]
    ctx = ContextPair(
        {k: resolve(t, s) for k, t in gamma.items()},
        {k: resolve(t, s) for k, t in delta.items()},
    )
    return ctx, normalize(s)


def _resolved(ctx: Mapping[str, Type], s: Subst) -> dict[str, Type]:
    return {k: resolve(t, s) for k, t in ctx.items()}


def derivation_x(net: XNet) -> list[str]:
    """A principal derivation, one judgement per line, premises indented
    under their conclusion. Binders are refreshed only when they clash."""
    if not is_barendregt(net):
        net = refresh(net, FreshSupply.after(all_names(net)))
    record: list = []
    _infer(net, record)
    mapping = canonical_renaming(t for *_, g, d in record for t in [*(g[k] for k in sorted(g)), *(d[k] for k in sorted(d))])
    lines = []
    for depth, n, g, d in record:
        ctx = ContextPair(g, d).renamed_vars(mapping)
        name = _RULE_NAMES.get(type(n)) or CUT_KEYWORDS[type(n)]
        lines.append(f"{'  ' * depth}({name}) {ctx}")
    return lines


def principal_x(net: XNet) -> ContextPair:
    """Principal contexts with type variables named A, B, ..."""
    return infer_x(net)[0].pretty()


def explain_x(net: XNet, ctx: ContextPair) -> str | None:
    """``None`` if ``net`` checks against ``ctx``, otherwise the reason."""
    try:
        principal, _ = infer_x(net)
    except Untypeable as e:
        return f"untypeable: {e}"
    s: Subst = {}
    for side, want, have in (("socket", principal.gamma, ctx.gamma), ("plug", principal.delta, ctx.delta)):
        for k, t in want.items():
            if k not in have:
                return f"free {side} {k} missing from context"
            if not match_type(t, have[k], s):
                return f"{side} {k} : {print_type(have[k])} is not an instance of the principal type"
    return None


def check_x(net: XNet, ctx: ContextPair) -> bool:
    """Does ``net`` have contexts ``ctx``? Variables in ``ctx`` are rigid;
    unused entries are accepted (weakening)."""
    return explain_x(net, ctx) is None


def parse_context(text: str, left: str = "sock", right: str = "plug") -> ContextPair:
    """Parse lines ``<left> x : T`` and ``<right> a : T``; lines starting ``--`` are comments."""
    gamma: dict[str, Type] = {}
    delta: dict[str, Type] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("--"):
            continue
        try:
            head, ty = line.split(":", 1)
            kw, name = head.split()
        except ValueError:
            raise TypeSyntaxError(f"line {lineno}: expected '{left}|{right} NAME : TYPE'") from None
        if kw not in (left, right):
            raise TypeSyntaxError(f"line {lineno}: unknown side {kw!r}; expected {left!r} or {right!r}")
        side = gamma if kw == left else delta
        if name in side:
            raise TypeSyntaxError(f"line {lineno}: {name} declared twice")
        side[name] = parse_type(ty)
    return ContextPair(gamma, delta)


def format_context(ctx: ContextPair, left: str = "sock", right: str = "plug") -> str:
    lines = [f"{left} {k} : {print_type(ctx.gamma[k])}" for k in sorted(ctx.gamma)]
    lines += [f"{right} {k} : {print_type(ctx.delta[k])}" for k in sorted(ctx.delta)]
    return "\n".join(lines) + ("\n" if lines else "")


def free_domain_ok(net: XNet, ctx: ContextPair) -> bool:
    return free_sockets(net) <= set(ctx.gamma) and free_plugs(net) <= set(ctx.delta)
