"""Nets of the X calculus: representation, concrete syntax and binding structure.

Connector names are plain strings. Whether a name is a socket or a plug is
decided by the position it occupies, never by its spelling::

    <x.a>                          capsule
    exp(x; P; a).b                 export, binds x and a in P
    imp(P | a / [y] / x | Q)       import, binds a in P and x in Q, y free
    cut(P | a / x | Q)             cut, binds a in P and x in Q
    cutL(...), cutR(...)           activated cuts, same binding as cut
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, NamedTuple, Union


class Kind(Enum):
    SOCKET = "socket"
    PLUG = "plug"


class Connector(NamedTuple):
    name: str
    kind: Kind


def socket(name: str) -> Connector:
    return Connector(name, Kind.SOCKET)


def plug(name: str) -> Connector:
    return Connector(name, Kind.PLUG)


@dataclass(frozen=True, slots=True)
class Capsule:
    sock: str
    plug: str


@dataclass(frozen=True, slots=True)
class Export:
    """``exp(sock; body; inner).plug``: publishes body's sock->inner behaviour on plug."""

    sock: str
    body: XNet
    inner: str
    plug: str


@dataclass(frozen=True, slots=True)
class Import:
    """``imp(left | plug / [mid] / sock | right)``."""

    left: XNet
    plug: str
    mid: str
    sock: str
    right: XNet


@dataclass(frozen=True, slots=True)
class AnyCut:
    left: XNet
    plug: str
    sock: str
    right: XNet


@dataclass(frozen=True, slots=True)
class Cut(AnyCut):
    pass


@dataclass(frozen=True, slots=True)
class CutL(AnyCut):
    pass


@dataclass(frozen=True, slots=True)
class CutR(AnyCut):
    pass


XNet = Union[Capsule, Export, Import, Cut, CutL, CutR]

CUT_KEYWORDS = {Cut: "cut", CutL: "cutL", CutR: "cutR"}


# --------------------------------------------------------------------------
# fresh names


class FreshSupply:
    """Monotone counter handing out names ``base#k``.

    Not thread safe; give each task its own supply (see :meth:`fork`).
    """

    def __init__(self, start: int = 0) -> None:
        self.counter = start

    def fresh(self, base: str) -> str:
        self.counter += 1
        return f"{base_name(base)}#{self.counter}"

    def fork(self) -> FreshSupply:
        return FreshSupply(self.counter)

    @classmethod
    def after(cls, names) -> FreshSupply:
        """A supply whose names cannot clash with any ``base#k`` in ``names``."""
        top = 0
        for n in names:
            _, _, suffix = n.partition("#")
            if suffix.isdigit():
                top = max(top, int(suffix))
        return cls(top)


def base_name(name: str) -> str:
    return name.split("#", 1)[0]


# --------------------------------------------------------------------------
# names


def free_sockets(net: XNet) -> frozenset[str]:
    match net:
        case Capsule(x, _):
            return frozenset((x,))
        case Export(x, body, _, _):
            return free_sockets(body) - {x}
        case Import(left, _, y, x, right):
            return free_sockets(left) | (free_sockets(right) - {x}) | {y}
        case AnyCut(left, _, x, right):
            return free_sockets(left) | (free_sockets(right) - {x})
    raise TypeError(f"not a net: {net!r}")


def free_plugs(net: XNet) -> frozenset[str]:
    match net:
        case Capsule(_, a):
            return frozenset((a,))
        case Export(_, body, a, b):
            return (free_plugs(body) - {a}) | {b}
        case Import(left, a, _, _, right):
            return (free_plugs(left) - {a}) | free_plugs(right)
        case AnyCut(left, a, _, right):
            return (free_plugs(left) - {a}) | free_plugs(right)
    raise TypeError(f"not a net: {net!r}")


def free_connectors(net: XNet) -> frozenset[Connector]:
    return frozenset(map(socket, free_sockets(net))) | frozenset(map(plug, free_plugs(net)))


def all_names(net: XNet) -> set[str]:
    """Every identifier occurring in ``net``, free or bound, of either kind."""
    match net:
        case Capsule(x, a):
            return {x, a}
        case Export(x, body, a, b):
            return all_names(body) | {x, a, b}
        case Import(left, a, y, x, right):
            return all_names(left) | all_names(right) | {a, y, x}
        case AnyCut(left, a, x, right):
            return all_names(left) | all_names(right) | {a, x}
    raise TypeError(f"not a net: {net!r}")


def binders(net: XNet) -> list[Connector]:
    """Bound connectors in pre-order, with repetitions."""
    match net:
        case Capsule():
            return []
        case Export(x, body, a, _):
            return [socket(x), plug(a)] + binders(body)
        case Import(left, a, _, x, right):
            return [plug(a), socket(x)] + binders(left) + binders(right)
        case AnyCut(left, a, x, right):
            return [plug(a), socket(x)] + binders(left) + binders(right)
    raise TypeError(f"not a net: {net!r}")


def size(net: XNet) -> int:
    match net:
        case Capsule():
            return 1
        case Export(_, body, _, _):
            return 1 + size(body)
        case Import(left, _, _, _, right) | AnyCut(left, _, _, right):
            return 1 + size(left) + size(right)
    raise TypeError(f"not a net: {net!r}")


def introduces_socket(net: XNet, x: str) -> bool:
    match net:
        case Capsule(y, _):
            return y == x
        case Import(left, _, y, _, right):
            return y == x and x not in free_sockets(left) and x not in free_sockets(right)
    return False


def introduces_plug(net: XNet, a: str) -> bool:
    match net:
        case Capsule(_, b):
            return b == a
        case Export(_, body, _, b):
            return b == a and a not in free_plugs(body)
    return False


# --------------------------------------------------------------------------
# children and positions


def children(net: XNet) -> tuple[XNet, ...]:
    match net:
        case Capsule():
            return ()
        case Export(_, body, _, _):
            return (body,)
        case Import(left, _, _, _, right) | AnyCut(left, _, _, right):
            return (left, right)
    raise TypeError(f"not a net: {net!r}")


def with_children(net: XNet, kids: tuple[XNet, ...]) -> XNet:
    match net:
        case Export(x, _, a, b):
            return Export(x, kids[0], a, b)
        case Import(_, a, y, x, _):
            return Import(kids[0], a, y, x, kids[1])
        case AnyCut(_, a, x, _):
            return type(net)(kids[0], a, x, kids[1])
    raise ValueError(f"{net!r} has no children")


def subnets(net: XNet, path: tuple[int, ...] = ()) -> Iterator[tuple[tuple[int, ...], XNet]]:
    """All sub-nets in pre-order together with their paths."""
    yield path, net
    for i, kid in enumerate(children(net)):
        yield from subnets(kid, path + (i,))


def subnet_at(net: XNet, path: tuple[int, ...]) -> XNet:
    for i in path:
        net = children(net)[i]
    return net


def replace_at(net: XNet, path: tuple[int, ...], new: XNet) -> XNet:
    if not path:
        return new
    kids = list(children(net))
    kids[path[0]] = replace_at(kids[path[0]], path[1:], new)
    return with_children(net, tuple(kids))


# --------------------------------------------------------------------------
# alpha conversion


def alpha_key(net: XNet) -> tuple:
    """A key equal for two nets iff they are alpha-equivalent."""

    def go(n: XNet, socks: dict, plugs: dict, depth: int) -> tuple:
        s = lambda name: socks.get(name, name)  # noqa: E731
        p = lambda name: plugs.get(name, name)  # noqa: E731
        match n:
            case Capsule(x, a):
                return ("cap", s(x), p(a))
            case Export(x, body, a, b):
                inner = go(body, {**socks, x: depth}, {**plugs, a: depth + 1}, depth + 2)
                return ("exp", inner, p(b))
            case Import(left, a, y, x, right):
                return (
                    "imp",
                    go(left, socks, {**plugs, a: depth}, depth + 1),
                    s(y),
                    go(right, {**socks, x: depth}, plugs, depth + 1),
                )
            case AnyCut(left, a, x, right):
                return (
                    CUT_KEYWORDS[type(n)],
                    go(left, socks, {**plugs, a: depth}, depth + 1),
                    go(right, {**socks, x: depth}, plugs, depth + 1),
                )
        raise TypeError(f"not a net: {n!r}")

    return go(net, {}, {}, 0)


def alpha_eq(p: XNet, q: XNet) -> bool:
    return alpha_key(p) == alpha_key(q)


def refresh(net: XNet, supply: FreshSupply) -> XNet:
    """Rename every binder to a fresh name, in pre-order."""

    def go(n: XNet, socks: dict, plugs: dict) -> XNet:
        match n:
            case Capsule(x, a):
                return Capsule(socks.get(x, x), plugs.get(a, a))
            case Export(x, body, a, b):
                x2, a2 = supply.fresh(x), supply.fresh(a)
                return Export(x2, go(body, {**socks, x: x2}, {**plugs, a: a2}), a2, plugs.get(b, b))
            case Import(left, a, y, x, right):
                a2, x2 = supply.fresh(a), supply.fresh(x)
                return Import(
                    go(left, socks, {**plugs, a: a2}),
                    a2,
                    socks.get(y, y),
                    x2,
                    go(right, {**socks, x: x2}, plugs),
                )
            case AnyCut(left, a, x, right):
                a2, x2 = supply.fresh(a), supply.fresh(x)
                return type(n)(go(left, socks, {**plugs, a: a2}), a2, x2, go(right, {**socks, x: x2}, plugs))
        raise TypeError(f"not a net: {n!r}")

    return go(net, {}, {})


def uniquify(net: XNet, supply: FreshSupply) -> XNet:
    """Restore the Barendregt convention while keeping names where possible.

    A binder is renamed only if its name is free in ``net`` or was already
    used by an earlier binder.
    """
    taken = set(free_sockets(net)) | set(free_plugs(net))

    def claim(name: str) -> str:
        if name in taken:
            name = supply.fresh(name)
        taken.add(name)
        return name

    def go(n: XNet, socks: dict, plugs: dict) -> XNet:
        match n:
            case Capsule(x, a):
                return Capsule(socks.get(x, x), plugs.get(a, a))
            case Export(x, body, a, b):
                b2 = plugs.get(b, b)
                x2, a2 = claim(x), claim(a)
                return Export(x2, go(body, {**socks, x: x2}, {**plugs, a: a2}), a2, b2)
            case Import(left, a, y, x, right):
                y2 = socks.get(y, y)
                a2, x2 = claim(a), claim(x)
                return Import(go(left, socks, {**plugs, a: a2}), a2, y2, x2, go(right, {**socks, x: x2}, plugs))
            case AnyCut(left, a, x, right):
                a2, x2 = claim(a), claim(x)
                return type(n)(go(left, socks, {**plugs, a: a2}), a2, x2, go(right, {**socks, x: x2}, plugs))
        raise TypeError(f"not a net: {n!r}")

    return go(net, {}, {})


def is_barendregt(net: XNet) -> bool:
    bound = [c.name for c in binders(net)]
    free = {c.name for c in free_connectors(net)}
    return len(bound) == len(set(bound)) and not (set(bound) & free)


def rename_connector(net: XNet, old: Connector, new: Connector) -> XNet:
    """Replace free occurrences of ``old`` by ``new`` (``P[new/old]``)."""
    if old.kind != new.kind:
        raise ValueError(f"cannot rename {old.kind.value} {old.name} to {new.kind.value} {new.name}")
    if old == new:
        return net
    if new in binders(net):
        raise ValueError(f"{new.name} is bound in the net; refresh first")
    is_sock = old.kind is Kind.SOCKET

    def go(n: XNet) -> XNet:
        match n:
            case Capsule(x, a):
                if is_sock and x == old.name:
                    return Capsule(new.name, a)
                if not is_sock and a == old.name:
                    return Capsule(x, new.name)
                return n
            case Export(x, body, a, b):
                shadowed = (x if is_sock else a) == old.name
                b2 = new.name if not is_sock and b == old.name else b
                return Export(x, body if shadowed else go(body), a, b2)
            case Import(left, a, y, x, right):
                y2 = new.name if is_sock and y == old.name else y
                left2 = left if (not is_sock and a == old.name) else go(left)
                right2 = right if (is_sock and x == old.name) else go(right)
                return Import(left2, a, y2, x, right2)
            case AnyCut(left, a, x, right):
                left2 = left if (not is_sock and a == old.name) else go(left)
                right2 = right if (is_sock and x == old.name) else go(right)
                return type(n)(left2, a, x, right2)
        raise TypeError(f"not a net: {n!r}")

    return go(net)


# --------------------------------------------------------------------------
# concrete syntax


class XSyntaxError(ValueError):
    def __init__(self, message: str, text: str, pos: int) -> None:
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.column = col


IDENT = r"[A-Za-z][A-Za-z0-9_]*(?:#[0-9]+)?"
_TOKEN = re.compile(rf"\s*(?:(?P<kw>cutL|cutR|cut|exp|imp)\(|(?P<id>{IDENT})|(?P<sym>[<>.;|/\[\]()]))")


class _Parser:
    def __init__(self, text: str, allow_active: bool) -> None:
        self.text = text
        self.pos = 0
        self.allow_active = allow_active
        self.roles: dict[str, tuple[Kind, int]] = {}

    def error(self, msg: str, pos: int | None = None):
        raise XSyntaxError(msg, self.text, self.pos if pos is None else pos)

    def peek(self):
        m = _TOKEN.match(self.text, self.pos)
        if not m:
            return None, None, self.pos
        if m.group("kw"):
            return "kw", m.group("kw"), m.start("kw")
        if m.group("id"):
            return "id", m.group("id"), m.start("id")
        return "sym", m.group("sym"), m.start("sym")

    def advance(self):
        m = _TOKEN.match(self.text, self.pos)
        self.pos = m.end()

    def expect(self, sym: str) -> None:
        kind, val, pos = self.peek()
        if kind != "sym" or val != sym:
            self.error(f"expected {sym!r}", pos)
        self.advance()

    def name(self, kind: Kind) -> str:
        tok, val, pos = self.peek()
        if tok != "id":
            self.error(f"expected a {kind.value} name", pos)
        seen = self.roles.get(val)
        if seen is not None and seen[0] is not kind:
            self.error(f"{val!r} used as {kind.value} but was used as {seen[0].value} before", pos)
        self.roles.setdefault(val, (kind, pos))
        self.advance()
        return val

    def net(self) -> XNet:
        tok, val, pos = self.peek()
        if tok == "sym" and val == "<":
            self.advance()
            x = self.name(Kind.SOCKET)
            self.expect(".")
            a = self.name(Kind.PLUG)
            self.expect(">")
            return Capsule(x, a)
        if tok != "kw":
            self.error("expected a net", pos)
        self.advance()
        if val == "exp":
            x = self.name(Kind.SOCKET)
            self.expect(";")
            body = self.net()
            self.expect(";")
            a = self.name(Kind.PLUG)
            self.expect(")")
            self.expect(".")
            b = self.name(Kind.PLUG)
            return Export(x, body, a, b)
        if val == "imp":
            left = self.net()
            self.expect("|")
            a = self.name(Kind.PLUG)
            self.expect("/")
            self.expect("[")
            y = self.name(Kind.SOCKET)
            self.expect("]")
            self.expect("/")
            x = self.name(Kind.SOCKET)
            self.expect("|")
            right = self.net()
            self.expect(")")
            return Import(left, a, y, x, right)
        if val in ("cutL", "cutR") and not self.allow_active:
            self.error(f"activated cut {val} not allowed here", pos)
        left = self.net()
        self.expect("|")
        a = self.name(Kind.PLUG)
        self.expect("/")
        x = self.name(Kind.SOCKET)
        self.expect("|")
        right = self.net()
        self.expect(")")
        return {"cut": Cut, "cutL": CutL, "cutR": CutR}[val](left, a, x, right)


def parse_xnet(text: str, allow_active: bool = False) -> XNet:
    """Parse one net.

    An identifier may not be used both as a socket and as a plug, and
    activated cuts are rejected unless ``allow_active`` is set.
    """
    p = _Parser(text, allow_active)
    net = p.net()
    if p.text[p.pos :].strip():
        p.error("trailing input", p.pos + len(p.text[p.pos :]) - len(p.text[p.pos :].lstrip()))
    return net


def print_xnet(net: XNet) -> str:
    match net:
        case Capsule(x, a):
            return f"<{x}.{a}>"
        case Export(x, body, a, b):
            return f"exp({x}; {print_xnet(body)}; {a}).{b}"
        case Import(left, a, y, x, right):
            return f"imp({print_xnet(left)} | {a} / [{y}] / {x} | {print_xnet(right)})"
        case AnyCut(left, a, x, right):
            return f"{CUT_KEYWORDS[type(net)]}({print_xnet(left)} | {a} / {x} | {print_xnet(right)})"
    raise TypeError(f"not a net: {net!r}")
