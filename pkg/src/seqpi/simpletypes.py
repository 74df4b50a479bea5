"""Implicative simple types and first-order unification."""

from __future__ import annotations

import itertools
import re
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass
from typing import Union


@dataclass(frozen=True, slots=True)
class TVar:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Arrow:
    left: Type
    right: Type

    def __str__(self) -> str:
        return print_type(self)


Type = Union[TVar, Arrow]
Subst = dict[str, Type]


class UnifyError(ValueError):
    pass


class OccursCheck(UnifyError):
    pass


class Clash(UnifyError):
    pass


class TypeVarSupply:
    """Produces fresh type variables ``t1``, ``t2``, ..."""

    def __init__(self, prefix: str = "t") -> None:
        self.prefix = prefix
        self._counter = itertools.count(1)

    def __call__(self) -> TVar:
        return TVar(f"{self.prefix}{next(self._counter)}")


def type_vars(t: Type) -> Iterator[str]:
    """Variables of ``t`` in left-to-right order (with repeats)."""
    match t:
        case TVar(n):
            yield n
        case Arrow(a, b):
            yield from type_vars(a)
            yield from type_vars(b)


def resolve(t: Type, s: Mapping[str, Type]) -> Type:
    """Apply ``s`` exhaustively (``s`` may be triangular)."""
    match t:
        case TVar(n):
            if n in s:
                return resolve(s[n], s)
            return t
        case Arrow(a, b):
            return Arrow(resolve(a, s), resolve(b, s))
    raise TypeError(f"not a type: {t!r}")


def occurs(n: str, t: Type, s: Mapping[str, Type]) -> bool:
    return n in type_vars(resolve(t, s))


def unify(a: Type, b: Type, s: Subst | None = None, rigid: frozenset[str] = frozenset()) -> Subst:
    """Extend ``s`` to a most general unifier of ``a`` and ``b``.

    The substitution is triangular and is updated in place; variables in
    ``rigid`` behave like constants.
    """
    s = {} if s is None else s
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        x, y = _walk(x, s), _walk(y, s)
        if x == y:
            continue
        match x, y:
            case TVar(n), _ if n not in rigid:
                _bind(n, y, s)
            case _, TVar(n) if n not in rigid:
                _bind(n, x, s)
            case Arrow(l1, r1), Arrow(l2, r2):
                stack.append((r1, r2))
                stack.append((l1, l2))
            case _:
                raise Clash(f"cannot unify {print_type(resolve(x, s))} with {print_type(resolve(y, s))}")
    return s


def _walk(t: Type, s: Mapping[str, Type]) -> Type:
    while isinstance(t, TVar) and t.name in s:
        t = s[t.name]
    return t


def _bind(n: str, t: Type, s: Subst) -> None:
    if occurs(n, t, s):
        raise OccursCheck(f"{n} occurs in {print_type(resolve(t, s))}")
    s[n] = t


def normalize(s: Mapping[str, Type]) -> Subst:
    """Idempotent form of a triangular substitution."""
    return {n: resolve(t, s) for n, t in s.items()}


def rename_vars(t: Type, mapping: Mapping[str, str]) -> Type:
    match t:
        case TVar(n):
            return TVar(mapping.get(n, n))
        case Arrow(a, b):
            return Arrow(rename_vars(a, mapping), rename_vars(b, mapping))
    raise TypeError(f"not a type: {t!r}")


def pretty_names() -> Iterator[str]:
    for n in itertools.count(1):
        for combo in itertools.product("ABCDEFGHIJKLMNOPQRSTUVWXYZ", repeat=n):
            yield "".join(combo)


def canonical_renaming(types: Iterable[Type]) -> dict[str, str]:
    """Map variables to A, B, C ... in order of first appearance."""
    names = pretty_names()
    mapping: dict[str, str] = {}
    for t in types:
        for v in type_vars(t):
            if v not in mapping:
                mapping[v] = next(names)
    return mapping


def print_type(t: Type) -> str:
    match t:
        case TVar(n):
            return n
        case Arrow(Arrow() as a, b):
            return f"({print_type(a)}) -> {print_type(b)}"
        case Arrow(a, b):
            return f"{print_type(a)} -> {print_type(b)}"
    raise TypeError(f"not a type: {t!r}")


class TypeSyntaxError(ValueError):
    pass


_TTOK = re.compile(r"\s*(?:(->)|([A-Za-z][A-Za-z0-9_']*)|([()]))")


def parse_type(text: str) -> Type:
    """``T ::= ident | T -> T | ( T )`` with ``->`` right-associative."""
    tokens: list[str] = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TTOK.match(text, pos)
        if not m:
            raise TypeSyntaxError(f"unexpected character at column {pos + 1} in {text!r}")
        tokens.append(m.group(1) or m.group(2) or m.group(3))
        pos = m.end()
    i = 0

    def arrow() -> Type:
        nonlocal i
        left = atom()
        if i < len(tokens) and tokens[i] == "->":
            i += 1
            return Arrow(left, arrow())
        return left

    def atom() -> Type:
        nonlocal i
        if i >= len(tokens):
            raise TypeSyntaxError(f"unexpected end of type {text!r}")
        tok = tokens[i]
        i += 1
        if tok == "(":
            t = arrow()
            if i >= len(tokens) or tokens[i] != ")":
                raise TypeSyntaxError(f"missing ')' in {text!r}")
            i += 1
            return t
        if tok in (")", "->"):
            raise TypeSyntaxError(f"unexpected {tok!r} in {text!r}")
        return TVar(tok)

    t = arrow()
    if i != len(tokens):
        raise TypeSyntaxError(f"trailing input in type {text!r}")
    return t


def match_type(pattern: Type, target: Type, s: Subst) -> bool:
    """One-way matching: extend ``s`` so that ``pattern[s] == target``."""
    match pattern, target:
        case TVar(n), _:
            if n in s:
                return s[n] == target
            s[n] = target
            return True
        case Arrow(a, b), Arrow(c, d):
            return match_type(a, c, s) and match_type(b, d, s)
    return False
