"""Cut elimination for X nets.

Redexes are located by a path of child indices (export body is child 0,
the left and right sub-nets of imports and cuts are children 0 and 1).
Discovery order is pre-order on paths, then the rule order of ``XRule``:
logical rules, then activation, then propagation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .xsyntax import (
    AnyCut,
    Capsule,
    Cut,
    CutL,
    CutR,
    Export,
    FreshSupply,
    Import,
    XNet,
    all_names,
    alpha_key,
    free_plugs,
    free_sockets,
    introduces_plug,
    introduces_socket,
    plug,
    print_xnet,
    rename_connector,
    replace_at,
    socket,
    subnet_at,
    subnets,
    uniquify,
)


class XRule(Enum):
    AX = "Ax"
    EXP_REN = "ExpRen"
    IMP_REN = "ImpRen"
    EXP_IMP_LEFT = "ExpImpLeft"
    EXP_IMP_RIGHT = "ExpImpRight"
    ACT_L = "ActL"
    ACT_R = "ActR"
    D_L = "d‡"
    CAP_L = "cap‡"
    EXP_OUTS_L = "exp-outs‡"
    EXP_INS_L = "exp-ins‡"
    IMP_L = "imp‡"
    CUT_L = "cut‡"
    R_D = "‡d"
    R_CAP = "‡cap"
    R_EXP = "‡exp"
    R_IMP_OUTS = "‡imp-outs"
    R_IMP_INS = "‡imp-ins"
    R_CUT = "‡cut"
    GC_L = "GcL"
    GC_R = "GcR"
    REN_L = "RenL"
    REN_R = "RenR"


LOGICAL = (XRule.AX, XRule.EXP_REN, XRule.IMP_REN, XRule.EXP_IMP_LEFT, XRule.EXP_IMP_RIGHT)
ACTIVATION = (XRule.ACT_L, XRule.ACT_R)
LEFT_PROPAGATION = (XRule.D_L, XRule.CAP_L, XRule.EXP_OUTS_L, XRule.EXP_INS_L, XRule.IMP_L, XRule.CUT_L)
RIGHT_PROPAGATION = (XRule.R_D, XRule.R_CAP, XRule.R_EXP, XRule.R_IMP_OUTS, XRule.R_IMP_INS, XRule.R_CUT)
CORE_RULES = LOGICAL + ACTIVATION + LEFT_PROPAGATION + RIGHT_PROPAGATION
ADMISSIBLE = (XRule.GC_L, XRule.GC_R, XRule.REN_L, XRule.REN_R)


class Strategy(Enum):
    FULL = "full"
    CBN = "cbn"
    CBV = "cbv"


@dataclass(frozen=True)
class Redex:
    path: tuple[int, ...]
    rule: XRule

    def __str__(self) -> str:
        return f"{format_path(self.path)} {self.rule.value}"


class RedexMismatch(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    def __init__(self, trace: Trace) -> None:
        super().__init__(f"no normal form within {len(trace.steps)} steps")
        self.trace = trace


@dataclass
class Trace:
    initial: XNet
    steps: list[tuple[Redex, XNet]] = field(default_factory=list)
    # number of redexes available before each step (Full strategy branch points)
    choices: list[int] = field(default_factory=list)

    @property
    def final(self) -> XNet:
        return self.steps[-1][1] if self.steps else self.initial

    def lines(self) -> list[str]:
        return [f"{r} => {print_xnet(net)}" for r, net in self.steps]

    def __str__(self) -> str:
        return "\n".join(self.lines())


def format_path(path: tuple[int, ...]) -> str:
    return "." + ".".join(map(str, path)) if path else "."


def parse_path(text: str) -> tuple[int, ...]:
    text = text.strip(".")
    return tuple(int(i) for i in text.split(".")) if text else ()


# --------------------------------------------------------------------------
# matching


def _allowed(rule: XRule, strategy: Strategy) -> bool:
    if strategy is Strategy.CBV:
        return rule is not XRule.EXP_IMP_RIGHT
    if strategy is Strategy.CBN:
        return rule is not XRule.EXP_IMP_LEFT
    return True


def matches(net: XNet, rule: XRule, strategy: Strategy = Strategy.FULL) -> bool:
    """Does ``rule`` (with its side condition) apply at the root of ``net``?"""
    if not _allowed(rule, strategy):
        return False
    if type(net) is Cut:
        left, a, x, right = net.left, net.plug, net.sock, net.right
        if rule in LOGICAL:
            if not (introduces_plug(left, a) and introduces_socket(right, x)):
                return False
            match rule, left, right:
                case XRule.AX, Capsule(), Capsule():
                    return True
                case XRule.EXP_REN, Export(), Capsule():
                    return True
                case XRule.IMP_REN, Capsule(), Import():
                    return True
                case XRule.EXP_IMP_LEFT | XRule.EXP_IMP_RIGHT, Export(), Import():
                    return True
            return False
        if rule is XRule.ACT_L:
            if introduces_plug(left, a):
                return False
            return strategy is not Strategy.CBN or introduces_socket(right, x)
        if rule is XRule.ACT_R:
            if introduces_socket(right, x):
                return False
            return strategy is not Strategy.CBV or introduces_plug(left, a)
        return False
    if type(net) is CutL:
        left, a = net.left, net.plug
        match rule, left:
            case XRule.D_L, Capsule(_, b):
                return b == a
            case XRule.CAP_L, Capsule(_, b):
                return b != a
            case XRule.EXP_OUTS_L, Export(_, _, _, b):
                return b == a
            case XRule.EXP_INS_L, Export(_, _, _, b):
                return b != a
            case XRule.IMP_L, Import():
                return True
            case XRule.CUT_L, Cut():
                return True
        return False
    if type(net) is CutR:
        right, x = net.right, net.sock
        match rule, right:
            case XRule.R_D, Capsule(y, _):
                return y == x
            case XRule.R_CAP, Capsule(y, _):
                return y != x
            case XRule.R_EXP, Export():
                return True
            case XRule.R_IMP_OUTS, Import(_, _, y, _, _):
                return y == x
            case XRule.R_IMP_INS, Import(_, _, y, _, _):
                return y != x
            case XRule.R_CUT, Cut():
                return True
        return False
    return False


def find_redexes(net: XNet, strategy: Strategy = Strategy.FULL) -> list[Redex]:
    found = []
    for path, sub in subnets(net):
        if not isinstance(sub, AnyCut):
            continue
        for rule in CORE_RULES:
            if matches(sub, rule, strategy):
                found.append(Redex(path, rule))
    return found


# --------------------------------------------------------------------------
# contraction


def contract(net: XNet, rule: XRule, supply: FreshSupply) -> XNet:
    """Right-hand side of ``rule`` at the root of ``net`` (no matching check)."""
    match rule, net:
        case XRule.AX, Cut(Capsule(y, _), _, _, Capsule(_, b)):
            return Capsule(y, b)
        case XRule.EXP_REN, Cut(Export(y, p, b, _), _, _, Capsule(_, g)):
            return Export(y, p, b, g)
        case XRule.IMP_REN, Cut(Capsule(y, _), _, _, Import(q, b, _, z, r)):
            return Import(q, b, y, z, r)
        case XRule.EXP_IMP_LEFT, Cut(Export(y, p, b, _), _, _, Import(q, g, _, z, r)):
            return Cut(q, g, y, Cut(p, b, z, r))
        case XRule.EXP_IMP_RIGHT, Cut(Export(y, p, b, _), _, _, Import(q, g, _, z, r)):
            return Cut(Cut(q, g, y, p), b, z, r)
        case XRule.ACT_L, Cut(p, a, x, q):
            return CutL(p, a, x, q)
        case XRule.ACT_R, Cut(p, a, x, q):
            return CutR(p, a, x, q)
        case XRule.D_L, CutL(p, a, x, q):
            return Cut(p, a, x, q)
        case XRule.CAP_L, CutL(cap, _, _, _):
            return cap
        case XRule.EXP_OUTS_L, CutL(Export(y, q, b, _), a, x, p):
            g = supply.fresh(a)
            return Cut(Export(y, CutL(q, a, x, p), b, g), g, x, p)
        case XRule.EXP_INS_L, CutL(Export(y, q, b, g), a, x, p):
            return Export(y, CutL(q, a, x, p), b, g)
        case XRule.IMP_L, CutL(Import(q, b, z, y, r), a, x, p):
            return Import(CutL(q, a, x, p), b, z, y, CutL(r, a, x, p))
        case XRule.CUT_L, CutL(Cut(q, b, y, r), a, x, p):
            return Cut(CutL(q, a, x, p), b, y, CutL(r, a, x, p))
        case XRule.R_D, CutR(p, a, x, q):
            return Cut(p, a, x, q)
        case XRule.R_CAP, CutR(_, _, _, cap):
            return cap
        case XRule.R_EXP, CutR(p, a, x, Export(y, q, b, g)):
            return Export(y, CutR(p, a, x, q), b, g)
        case XRule.R_IMP_OUTS, CutR(p, a, x, Import(q, b, _, y, r)):
            z = supply.fresh(x)
            return Cut(p, a, z, Import(CutR(p, a, x, q), b, z, y, CutR(p, a, x, r)))
        case XRule.R_IMP_INS, CutR(p, a, x, Import(q, b, z, y, r)):
            return Import(CutR(p, a, x, q), b, z, y, CutR(p, a, x, r))
        case XRule.R_CUT, CutR(p, a, x, Cut(q, b, y, r)):
            return Cut(CutR(p, a, x, q), b, y, CutR(p, a, x, r))
        case XRule.GC_L, CutL(p, _, _, _):
            return p
        case XRule.GC_R, CutR(_, _, _, q):
            return q
        case XRule.REN_L, Cut(p, d, _, Capsule(_, a)):
            return rename_connector(p, plug(d), plug(a))
        case XRule.REN_R, Cut(Capsule(z, _), _, x, p):
            return rename_connector(p, socket(x), socket(z))
    raise RedexMismatch(f"{rule.value} does not apply to {print_xnet(net)}")


def _supply_for(net: XNet, supply: FreshSupply | None) -> FreshSupply:
    return supply if supply is not None else FreshSupply.after(all_names(net))


def apply_redex(net: XNet, redex: Redex, supply: FreshSupply | None = None, strategy: Strategy = Strategy.FULL) -> XNet:
    """Contract ``redex``; the result satisfies the Barendregt convention.

    Binders are renamed only where the rule duplicated a sub-net or would
    otherwise capture, so unaffected names survive the step.
    """
    supply = _supply_for(net, supply)
    try:
        sub = subnet_at(net, redex.path)
    except (IndexError, TypeError):
        raise RedexMismatch(f"no sub-net at {format_path(redex.path)}") from None
    if not isinstance(sub, AnyCut) or not matches(sub, redex.rule, strategy):
        raise RedexMismatch(f"{redex.rule.value} does not match at {format_path(redex.path)}: {print_xnet(sub)}")
    return uniquify(replace_at(net, redex.path, contract(sub, redex.rule, supply)), supply)


def step_all(net: XNet, supply: FreshSupply | None = None, strategy: Strategy = Strategy.FULL) -> list[XNet]:
    """One-step reducts, deduplicated up to alpha-equivalence, in redex order."""
    supply = _supply_for(net, supply)
    seen: dict[tuple, XNet] = {}
    for r in find_redexes(net, strategy):
        q = apply_redex(net, r, supply, strategy)
        seen.setdefault(alpha_key(q), q)
    return list(seen.values())


def step_all_tagged(net: XNet, supply: FreshSupply | None = None) -> list[tuple[Redex, XNet]]:
    """Every (redex, reduct) pair without deduplication."""
    supply = _supply_for(net, supply)
    return [(r, apply_redex(net, r, supply)) for r in find_redexes(net)]


def reduce(
    net: XNet,
    strategy: Strategy = Strategy.FULL,
    max_steps: int = 1000,
    supply: FreshSupply | None = None,
) -> Trace:
    """Contract the first redex in canonical order until normal form.

    Raises ``BudgetExceeded`` (carrying the partial trace) if redexes remain
    after ``max_steps`` steps.
    """
    if max_steps < 0:
        raise ValueError("max_steps must be non-negative")
    supply = _supply_for(net, supply)
    trace = Trace(net)
    current = net
    while True:
        redexes = find_redexes(current, strategy)
        if not redexes:
            return trace
        if len(trace.steps) >= max_steps:
            raise BudgetExceeded(trace)
        trace.choices.append(len(redexes))
        current = apply_redex(current, redexes[0], supply, strategy)
        trace.steps.append((redexes[0], current))


# --------------------------------------------------------------------------
# admissible shortcuts


def shortcut_rule(net: XNet) -> XRule | None:
    """The admissible rule applicable at the root of ``net``, if any."""
    match net:
        case CutL(p, a, _, _) if a not in free_plugs(p):
            return XRule.GC_L
        case CutR(_, _, x, q) if x not in free_sockets(q):
            return XRule.GC_R
        case Cut(_, _, z, Capsule(y, _)) if y == z:
            return XRule.REN_L
        case Cut(Capsule(_, b), a, _, _) if b == a:
            return XRule.REN_R
    return None


def gc_renaming(net: XNet, supply: FreshSupply | None = None) -> XNet:
    """Apply garbage collection and renaming shortcuts everywhere, outermost first."""
    supply = _supply_for(net, supply)

    def go(n: XNet) -> XNet:
        while (rule := shortcut_rule(n)) is not None:
            n = contract(n, rule, supply)
        match n:
            case Capsule():
                return n
            case Export(x, body, a, b):
                return Export(x, go(body), a, b)
            case Import(left, a, y, x, right):
                return Import(go(left), a, y, x, go(right))
            case AnyCut(left, a, x, right):
                out = type(n)(go(left), a, x, go(right))
                return go(out) if shortcut_rule(out) else out
        raise TypeError(f"not a net: {n!r}")

    return uniquify(go(net), supply)
