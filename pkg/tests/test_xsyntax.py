from __future__ import annotations

import pytest
from hypothesis import given

from conftest import nets, scoped_nets
from seqpi.corpus import peirce
from seqpi.xsyntax import (
    Capsule,
    Cut,
    CutL,
    Export,
    FreshSupply,
    Import,
    XSyntaxError,
    all_names,
    alpha_eq,
    binders,
    free_connectors,
    free_plugs,
    free_sockets,
    introduces_plug,
    introduces_socket,
    is_barendregt,
    parse_xnet,
    plug,
    print_xnet,
    refresh,
    rename_connector,
    replace_at,
    size,
    socket,
    subnet_at,
    subnets,
    uniquify,
)

PEIRCE = Export(
    "z",
    Import(Export("y", Capsule("y", "d"), "h", "a"), "a", "z", "w", Capsule("w", "d")),
    "d",
    "g",
)


class TestParse:
    def test_capsule(self):
        assert parse_xnet("<x.a>") == Capsule("x", "a")

    def test_axiom_cut(self):
        assert parse_xnet("cut(<y.a> | a / x | <x.b>)") == Cut(Capsule("y", "a"), "a", "x", Capsule("x", "b"))

    def test_peirce(self):
        assert parse_xnet("exp(z; imp(exp(y; <y.d> ; h).a | a / [z] / w | <w.d>); d).g") == PEIRCE
        assert peirce() == PEIRCE

    def test_whitespace_is_insignificant(self):
        assert parse_xnet("cut(<y.a>|a/x|<x.b>)") == parse_xnet(" cut( <y.a> | a / x | <x.b> ) ")

    def test_activated_cuts_need_flag(self):
        with pytest.raises(XSyntaxError):
            parse_xnet("cutL(<y.a> | a / x | <x.b>)")
        assert isinstance(parse_xnet("cutL(<y.a> | a / x | <x.b>)", allow_active=True), CutL)

    @pytest.mark.parametrize("text", ["", "<x>", "<x.a", "cut(<x.a> | a / x)", "exp(x; <x.a>).b", "<x.a> junk", "imp(<x.a> | a / x / y | <y.b>)"])
    def test_errors(self, text):
        with pytest.raises(XSyntaxError):
            parse_xnet(text)

    def test_error_mentions_position(self):
        with pytest.raises(XSyntaxError, match=r"1:\d+"):
            parse_xnet("cut(<y.a>|")

    @given(nets())
    def test_round_trip(self, net):
        assert parse_xnet(print_xnet(net), allow_active=True) == net


class TestFreeNames:
    def test_capsule(self):
        assert free_sockets(Capsule("x", "a")) == {"x"}
        assert free_plugs(Capsule("x", "a")) == {"a"}

    def test_export_binds(self):
        n = Export("x", Capsule("x", "a"), "a", "b")
        assert free_sockets(n) == frozenset()
        assert free_plugs(n) == {"b"}

    def test_peirce(self):
        assert free_sockets(PEIRCE) == frozenset()
        assert free_plugs(PEIRCE) == {"g"}

    def test_import_socket_is_free(self):
        n = Import(Capsule("z", "b"), "b", "y", "x", Capsule("x", "c"))
        assert free_sockets(n) == {"z", "y"}
        assert free_plugs(n) == {"c"}

    def test_connectors(self):
        assert free_connectors(Capsule("x", "a")) == {socket("x"), plug("a")}


class TestIntroduces:
    def test_capsule_socket(self):
        assert introduces_socket(Capsule("x", "a"), "x")

    def test_export_plug(self):
        assert introduces_plug(Export("y", Capsule("y", "a"), "a", "a2"), "a2")
        assert not introduces_plug(Export("y", Capsule("y", "a2"), "a", "a2"), "a2")

    def test_import_socket_free_on_right(self):
        assert not introduces_socket(Import(Capsule("z", "b"), "b", "x", "w", Capsule("x", "c")), "x")
        assert introduces_socket(Import(Capsule("z", "b"), "b", "x", "w", Capsule("w", "c")), "x")

    def test_cut_introduces_nothing(self):
        n = Cut(Capsule("x", "a"), "a", "y", Capsule("y", "b"))
        assert not introduces_socket(n, "x")
        assert not introduces_plug(n, "b")


class TestAlpha:
    def test_bound_renaming(self):
        assert alpha_eq(Export("x", Capsule("x", "a"), "a", "b"), Export("y", Capsule("y", "c"), "c", "b"))

    def test_free_names_matter(self):
        assert not alpha_eq(Capsule("x", "a"), Capsule("y", "a"))

    def test_peirce_refresh(self):
        fresh = refresh(PEIRCE, FreshSupply.after(all_names(PEIRCE)))
        assert fresh != PEIRCE
        assert alpha_eq(PEIRCE, fresh)

    def test_refresh_is_deterministic(self):
        a = refresh(PEIRCE, FreshSupply.after(all_names(PEIRCE)))
        b = refresh(PEIRCE, FreshSupply.after(all_names(PEIRCE)))
        assert a == b

    @given(nets())
    def test_refresh_preserves_alpha_class(self, net):
        fresh = refresh(net, FreshSupply.after(all_names(net)))
        assert alpha_eq(net, fresh)
        assert free_connectors(fresh) == free_connectors(net)

    @given(nets())
    def test_uniquify_gives_barendregt(self, net):
        u = uniquify(net, FreshSupply.after(all_names(net)))
        assert is_barendregt(u)
        assert alpha_eq(u, net)


class TestRename:
    def test_plug(self):
        assert rename_connector(Capsule("x", "a"), plug("a"), plug("b")) == Capsule("x", "b")

    def test_absent(self):
        assert rename_connector(Capsule("x", "a"), plug("g"), plug("b")) == Capsule("x", "a")

    def test_export_outer_plug(self):
        n = Export("x", Capsule("x", "a"), "a", "b")
        assert rename_connector(n, plug("b"), plug("c")) == Export("x", Capsule("x", "a"), "a", "c")

    def test_bound_name_untouched(self):
        n = Export("x", Capsule("x", "a"), "a", "b")
        assert rename_connector(n, socket("x"), socket("y")) == n

    def test_kind_mismatch(self):
        with pytest.raises(ValueError):
            rename_connector(Capsule("x", "a"), plug("a"), socket("a"))

    def test_capture_refused(self):
        with pytest.raises(ValueError):
            rename_connector(Export("x", Capsule("x", "a"), "a", "b"), plug("b"), plug("a"))

    @given(scoped_nets())
    def test_free_set_updated(self, net):
        fp = free_plugs(net)
        if "a" not in fp or "q9" in all_names(net):
            return
        renamed = rename_connector(net, plug("a"), plug("q9"))
        assert free_plugs(renamed) == (fp - {"a"}) | {"q9"}


class TestPaths:
    def test_subnets_preorder(self):
        paths = [p for p, _ in subnets(PEIRCE)]
        assert paths == [(), (0,), (0, 0), (0, 0, 0), (0, 1)]

    def test_replace(self):
        assert subnet_at(PEIRCE, (0, 1)) == Capsule("w", "d")
        n = replace_at(PEIRCE, (0, 1), Capsule("w", "e"))
        assert subnet_at(n, (0, 1)) == Capsule("w", "e")
        assert size(n) == size(PEIRCE) == 5

    def test_binders(self):
        assert {c.name for c in binders(PEIRCE)} == {"z", "d", "y", "h", "a", "w"}
