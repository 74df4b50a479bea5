from __future__ import annotations

import pytest
from hypothesis import given, settings

from conftest import typed_nets
from seqpi.encode import encode_x, forwarder
from seqpi.pirewrite import pi_step
from seqpi.pisyntax import NIL, pair_in, parse_pi
from seqpi.pitypes import derive_pair_in, explain_pi, format_pi_context, parse_pi_context, pi_check
from seqpi.simpletypes import Arrow, TVar, TypeSyntaxError, parse_type
from seqpi.xsyntax import parse_xnet
from seqpi.xtypes import ContextPair, infer_x

A, B = TVar("A"), TVar("B")


def ctx(inputs: dict | None = None, outputs: dict | None = None) -> ContextPair:
    return ContextPair(
        {k: parse_type(v) for k, v in (inputs or {}).items()},
        {k: parse_type(v) for k, v in (outputs or {}).items()},
    )


class TestCheck:
    @pytest.mark.parametrize("c", [ctx(), ctx({"a": "A"}), ctx({}, {"b": "A -> B"})])
    def test_nil(self, c):
        assert pi_check(NIL, c)

    def test_forwarder(self):
        assert pi_check(forwarder("x", "a"), ctx({"x": "A"}, {"a": "A"}))
        assert not pi_check(forwarder("x", "a"), ctx({"x": "A"}, {"a": "B"}))

    def test_export_image(self):
        p = encode_x(parse_xnet("exp(x; <x.a>; a).b"))
        assert pi_check(p, ctx({}, {"b": "A -> A"}))
        assert not pi_check(p, ctx({}, {"b": "A -> B"}))

    def test_export_output_shape(self):
        p = parse_pi("new x.new a.(x(o).a<o> | b<<x,a>>)")
        assert pi_check(p, ctx({}, {"b": "A -> A"}))

    def test_import_image(self):
        net = parse_xnet("imp(<z.b> | b / [y] / w | <w.c>)")
        assert pi_check(encode_x(net), ctx({"y": "A -> B", "z": "A"}, {"c": "B"}))

    def test_explain_names_the_problem(self):
        reason = explain_pi(forwarder("x", "a"), ctx({"x": "A"}, {"a": "B"}))
        assert reason

    def test_missing_channel(self):
        assert not pi_check(parse_pi("a<b>"), ctx())

    def test_replication_and_restriction(self):
        assert pi_check(parse_pi("new c.(!a(x).c<x> | c(y).b<y>)"), ctx({"a": "A"}, {"b": "A"}))


class TestPairInput:
    def test_arrow(self):
        assert derive_pair_in("a", "x", "y", NIL, ctx({"a": "A -> B"}))
        assert pi_check(pair_in("a", "x", "y", NIL, "w"), ctx({"a": "A -> B"}))

    def test_non_arrow(self):
        assert not derive_pair_in("a", "x", "y", NIL, ctx({"a": "A"}))

    def test_body_sees_components(self):
        body = forwarder("y", "x")
        assert not derive_pair_in("a", "x", "y", body, ctx({"a": "A -> B"}))
        assert derive_pair_in("a", "x", "y", body, ctx({"a": "A -> A"}))


class TestContexts:
    def test_round_trip(self):
        c = parse_pi_context("in a : A -> B\nout b : A\n")
        assert c.gamma == {"a": Arrow(A, B)}
        assert format_pi_context(c) == "in a : A -> B\nout b : A\n"

    def test_error(self):
        with pytest.raises(TypeSyntaxError):
            parse_pi_context("sock a : A")


@settings(max_examples=40)
@given(typed_nets(5))
def test_witness_reduction_on_images(net):
    c, _ = infer_x(net)
    p = encode_x(net)
    assert pi_check(p, c)
    for q in pi_step(p):
        assert pi_check(q, c)
