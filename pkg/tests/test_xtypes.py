from __future__ import annotations

import pytest
from hypothesis import given

from conftest import typed_nets
from seqpi.corpus import peirce
from seqpi.simpletypes import (
    Arrow,
    Clash,
    OccursCheck,
    TVar,
    TypeSyntaxError,
    match_type,
    normalize,
    parse_type,
    print_type,
    resolve,
    unify,
)
from seqpi.xrewrite import step_all
from seqpi.xsyntax import Capsule, Cut, parse_xnet
from seqpi.xtypes import (
    ContextPair,
    Untypeable,
    check_x,
    derivation_x,
    explain_x,
    format_context,
    infer_x,
    parse_context,
    principal_x,
)

A, B, C = TVar("A"), TVar("B"), TVar("C")
t1, t2, t3 = TVar("t1"), TVar("t2"), TVar("t3")


class TestTypes:
    def test_print_is_right_associative(self):
        assert print_type(Arrow(Arrow(A, B), Arrow(A, B))) == "(A -> B) -> A -> B"

    @pytest.mark.parametrize("text", ["A", "A -> B", "(A -> B) -> A", "((A -> B) -> A) -> A", "A -> B -> C"])
    def test_round_trip(self, text):
        assert print_type(parse_type(text)) == text

    @pytest.mark.parametrize("text", ["", "A ->", "(A", "A B", "->"])
    def test_parse_errors(self, text):
        with pytest.raises(TypeSyntaxError):
            parse_type(text)


class TestUnify:
    def test_identity(self):
        assert unify(t1, t1) == {}

    def test_binds_variable(self):
        s = unify(Arrow(t1, t2), t3)
        assert normalize(s) == {"t3": Arrow(t1, t2)}

    def test_occurs_check(self):
        with pytest.raises(OccursCheck):
            unify(t1, Arrow(t1, t2))

    def test_rigid_clash(self):
        with pytest.raises(Clash):
            unify(A, Arrow(t1, t2), rigid=frozenset({"A"}))

    def test_most_general(self):
        s = unify(Arrow(t1, Arrow(t2, t1)), Arrow(Arrow(t3, t3), TVar("t4")))
        assert resolve(TVar("t4"), s) == Arrow(t2, Arrow(t3, t3))

    def test_matching_is_one_way(self):
        assert match_type(Arrow(A, A), Arrow(B, B), {})
        assert not match_type(Arrow(B, B), Arrow(A, C), {"B": A})
        assert not match_type(Arrow(A, B), A, {})


class TestInfer:
    def test_capsule(self):
        ctx, _ = infer_x(Capsule("x", "a"))
        assert ctx.gamma["x"] == ctx.delta["a"]
        assert isinstance(ctx.gamma["x"], TVar)

    def test_peirce(self):
        assert str(principal_x(peirce())) == "|- g : ((A -> B) -> A) -> A"

    def test_axiom_cut(self):
        ctx = principal_x(Cut(Capsule("x", "a"), "a", "y", Capsule("y", "b")))
        assert ctx == ContextPair({"x": A}, {"b": A})

    def test_untypeable(self):
        with pytest.raises(Untypeable, match="OccursCheck"):
            infer_x(parse_xnet("cut(<y.a> | a / x | imp(<x.b> | b / [x] / w | <w.c>))"))

    def test_shadowing_is_handled(self):
        n = parse_xnet("exp(x; exp(x; <x.a>; a).c; c).d")
        assert str(principal_x(n)) == "|- d : A -> B -> B"

    def test_derivation_shape(self):
        assert derivation_x(peirce()) == [
            "(exp) |- g : ((A -> B) -> A) -> A",
            "  (imp) z : (A -> B) -> A |- d : A",
            "    (exp) |- a : A -> B, d : A",
            "      (cap) y : A |- d : A",
            "    (cap) w : A |- d : A",
        ]


class TestCheck:
    def test_instance(self):
        assert check_x(Capsule("x", "a"), ContextPair({"x": Arrow(A, B)}, {"a": Arrow(A, B)}))

    def test_mismatch(self):
        assert not check_x(Capsule("x", "a"), ContextPair({"x": A}, {"a": B}))
        assert "plug a" in explain_x(Capsule("x", "a"), ContextPair({"x": A}, {"a": B}))

    def test_peirce(self):
        assert check_x(peirce(), ContextPair({}, {"g": parse_type("((A -> B) -> A) -> A")}))
        assert not check_x(peirce(), ContextPair({}, {"g": parse_type("((A -> B) -> B) -> A")}))

    def test_missing_name(self):
        assert "missing" in explain_x(Capsule("x", "a"), ContextPair({}, {"a": A}))

    def test_weakening(self):
        assert check_x(Capsule("x", "a"), ContextPair({"x": A, "y": B}, {"a": A, "c": C}))

    def test_context_files(self):
        text = "-- a comment\nsock x : A -> B\nplug a : A -> B\n"
        ctx = parse_context(text)
        assert format_context(ctx) == "sock x : A -> B\nplug a : A -> B\n"
        with pytest.raises(TypeSyntaxError):
            parse_context("sock x A")
        with pytest.raises(TypeSyntaxError):
            parse_context("wire x : A")
        with pytest.raises(TypeSyntaxError):
            parse_context("sock x : A\nsock x : B")

    @given(typed_nets())
    def test_principal_typing_checks(self, net):
        assert check_x(net, infer_x(net)[0])

    @given(typed_nets(7))
    def test_witness_reduction(self, net):
        ctx, _ = infer_x(net)
        for q in step_all(net):
            assert check_x(q, ctx)
