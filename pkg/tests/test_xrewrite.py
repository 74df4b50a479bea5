from __future__ import annotations

import pytest
from hypothesis import given

from conftest import nets, scoped_nets
from seqpi.corpus import corpus_nets, read_entries
from seqpi.oracles import enumerate_nets, oracle_redexes
from seqpi.xrewrite import (
    ADMISSIBLE,
    CORE_RULES,
    BudgetExceeded,
    Redex,
    RedexMismatch,
    Strategy,
    XRule,
    apply_redex,
    contract,
    find_redexes,
    format_path,
    gc_renaming,
    matches,
    parse_path,
    reduce,
    shortcut_rule,
    step_all,
    step_all_tagged,
)
from seqpi.xsyntax import (
    Capsule,
    Cut,
    CutL,
    CutR,
    Export,
    FreshSupply,
    Import,
    alpha_eq,
    free_connectors,
    parse_xnet,
    print_xnet,
    size,
)

AX = Cut(Capsule("y", "a"), "a", "x", Capsule("x", "b"))
BOTH_FREE = Cut(Capsule("x", "a"), "g", "z", Capsule("y", "b"))
ROOT = ()


def supply() -> FreshSupply:
    return FreshSupply(100)


class TestFindRedexes:
    def test_axiom_only(self):
        assert find_redexes(AX) == [Redex(ROOT, XRule.AX)]

    def test_capsule_has_none(self):
        assert find_redexes(Capsule("x", "a")) == []

    def test_both_activations(self):
        assert find_redexes(BOTH_FREE) == [Redex(ROOT, XRule.ACT_L), Redex(ROOT, XRule.ACT_R)]

    def test_cbv_forbids_right_exp_imp(self):
        n = parse_xnet("cut(exp(y; <y.c>; c).a | a / x | imp(<z.b> | b / [x] / w | <w.g>))")
        assert {r.rule for r in find_redexes(n)} == {XRule.EXP_IMP_LEFT, XRule.EXP_IMP_RIGHT}
        assert {r.rule for r in find_redexes(n, Strategy.CBV)} == {XRule.EXP_IMP_LEFT}
        assert {r.rule for r in find_redexes(n, Strategy.CBN)} == {XRule.EXP_IMP_RIGHT}

    def test_cbv_right_activation_needs_left_introduction(self):
        # left introduces g, right does not introduce z
        n = parse_xnet("cut(<x.g> | g / z | <y.b>)")
        assert {r.rule for r in find_redexes(n, Strategy.FULL)} == {XRule.ACT_R}
        assert {r.rule for r in find_redexes(n, Strategy.CBV)} == {XRule.ACT_R}
        assert find_redexes(BOTH_FREE, Strategy.CBV) == [Redex(ROOT, XRule.ACT_L)]
        assert find_redexes(BOTH_FREE, Strategy.CBN) == [Redex(ROOT, XRule.ACT_R)]

    def test_nested_paths(self):
        n = Export("u", AX, "v", "w")
        assert find_redexes(n) == [Redex((0,), XRule.AX)]

    @pytest.mark.parametrize("entry", read_entries("rules.txt"), ids=lambda e: e.name)
    def test_rule_corpus_agrees_with_oracle(self, entry):
        n = parse_xnet(entry.text, allow_active=True)
        for s in Strategy:
            assert set(find_redexes(n, s)) == oracle_redexes(n, s)

    def test_peirce_cut_against_capsule(self):
        n = parse_xnet("cut(exp(z; imp(exp(y; <y.d> ; h).a | a / [z] / w | <w.d>); d).g | g / x | <x.b>)")
        found = find_redexes(n)
        assert set(found) == oracle_redexes(n)
        assert found == [Redex(ROOT, XRule.EXP_REN)]

    @given(nets())
    def test_agrees_with_oracle(self, net):
        for s in Strategy:
            assert set(find_redexes(net, s)) == oracle_redexes(net, s)

    @given(nets())
    def test_canonical_order_is_stable(self, net):
        assert find_redexes(net) == find_redexes(net)

    def test_matches_is_root_only(self):
        assert matches(AX, XRule.AX)
        assert not matches(Export("u", AX, "v", "w"), XRule.AX)


class TestContract:
    def test_axiom(self):
        assert contract(AX, XRule.AX, supply()) == Capsule("y", "b")

    def test_export_renaming(self):
        p = Capsule("y", "b")
        n = Cut(Export("y", p, "b", "a"), "a", "x", Capsule("x", "g"))
        assert contract(n, XRule.EXP_REN, supply()) == Export("y", p, "b", "g")

    def test_import_renaming(self):
        n = parse_xnet("cut(<y.a> | a / x | imp(<z.b> | b / [x] / w | <w.g>))")
        assert alpha_eq(contract(n, XRule.IMP_REN, supply()), parse_xnet("imp(<z.b> | b / [y] / w | <w.g>)"))

    def test_exp_imp_left_grouping(self):
        p, q, r = Capsule("y", "b"), Capsule("u", "g"), Capsule("z", "c")
        n = Cut(Export("y", p, "b", "a"), "a", "x", Import(q, "g", "x", "z", r))
        assert alpha_eq(contract(n, XRule.EXP_IMP_LEFT, supply()), Cut(q, "g", "y", Cut(p, "b", "z", r)))

    def test_exp_imp_right_grouping(self):
        p, q, r = Capsule("y", "b"), Capsule("u", "g"), Capsule("z", "c")
        n = Cut(Export("y", p, "b", "a"), "a", "x", Import(q, "g", "x", "z", r))
        assert alpha_eq(contract(n, XRule.EXP_IMP_RIGHT, supply()), Cut(Cut(q, "g", "y", p), "b", "z", r))

    def test_activation(self):
        assert contract(BOTH_FREE, XRule.ACT_L, supply()) == CutL(Capsule("x", "a"), "g", "z", Capsule("y", "b"))
        assert contract(BOTH_FREE, XRule.ACT_R, supply()) == CutR(Capsule("x", "a"), "g", "z", Capsule("y", "b"))

    def test_left_propagation_rules(self):
        cases = {
            "d-left": (XRule.D_L, "cut(<y.a> | a / x | <x.b>)"),
            "cap-left": (XRule.CAP_L, "<y.c>"),
            "exp-outs-left": (XRule.EXP_OUTS_L, "cut(exp(y; cutL(<z.a> | a / x | <x.b>); c).a | a / x | <x.b>)"),
            "exp-ins-left": (XRule.EXP_INS_L, "exp(y; cutL(<y.a> | a / x | <x.b>); c).g"),
            "imp-left": (XRule.IMP_L, "imp(cutL(<y.a> | a / x | <x.b>) | c / [z] / w | cutL(<w.a> | a / x | <x.b>))"),
            "cut-left": (XRule.CUT_L, "cut(cutL(<y.a> | a / x | <x.b>) | c / w | cutL(<w.a> | a / x | <x.b>))"),
        }
        self._check(cases)

    def test_right_propagation_rules(self):
        cases = {
            "d-right": (XRule.R_D, "cut(<y.a> | a / x | <x.b>)"),
            "cap-right": (XRule.R_CAP, "<z.b>"),
            "exp-right": (XRule.R_EXP, "exp(u; cutR(<y.a> | a / x | <x.v>); v).b"),
            "imp-outs-right": (
                XRule.R_IMP_OUTS,
                "cut(<y.a> | a / x | imp(cutR(<y.a> | a / x | <z.c>) | c / [x] / w | cutR(<y.a> | a / x | <w.b>)))",
            ),
            "imp-ins-right": (
                XRule.R_IMP_INS,
                "imp(cutR(<y.a> | a / x | <x.c>) | c / [z] / w | cutR(<y.a> | a / x | <w.b>))",
            ),
            "cut-right": (XRule.R_CUT, "cut(cutR(<y.a> | a / x | <x.c>) | c / w | cutR(<y.a> | a / x | <w.b>))"),
        }
        self._check(cases)

    @staticmethod
    def _check(cases):
        entries = {e.name: e.text for e in read_entries("rules.txt")}
        for name, (rule, expected) in cases.items():
            net = parse_xnet(entries[name], allow_active=True)
            assert Redex(ROOT, rule) in find_redexes(net), name
            got = contract(net, rule, FreshSupply.after({"x", "y", "z", "w", "u", "v", "a", "b", "c", "g"}))
            assert alpha_eq(got, parse_xnet(expected, allow_active=True)), (name, print_xnet(got))

    def test_mismatch(self):
        with pytest.raises(RedexMismatch):
            contract(AX, XRule.EXP_REN, supply())
        with pytest.raises(RedexMismatch):
            apply_redex(AX, Redex((0,), XRule.AX))


class TestStepAll:
    def test_non_confluence(self):
        reach = {print_xnet(n) for n in step_all(BOTH_FREE)}
        reach |= {print_xnet(m) for n in step_all(BOTH_FREE) for m in step_all(n)}
        assert "<x.a>" in reach
        assert "<y.b>" in reach

    def test_capsule(self):
        assert step_all(Capsule("x", "a")) == []

    def test_every_core_rule_covered_by_rule_corpus(self):
        seen = set()
        for e in read_entries("rules.txt"):
            seen |= {r.rule for r, _ in step_all_tagged(parse_xnet(e.text, allow_active=True))}
        assert seen == set(CORE_RULES)

    @given(nets())
    def test_free_connectors_never_grow(self, net):
        for q in step_all(net):
            assert free_connectors(q) <= free_connectors(net)

    @given(scoped_nets())
    def test_reducts_are_deduplicated_up_to_alpha(self, net):
        out = step_all(net)
        for i, p in enumerate(out):
            assert not any(alpha_eq(p, q) for q in out[i + 1 :])


class TestReduce:
    def test_cbn_axiom(self):
        t = reduce(AX, Strategy.CBN, 10)
        assert t.final == Capsule("y", "b")
        assert t.lines() == [". Ax => <y.b>"]

    def test_empty_trace(self):
        t = reduce(Capsule("x", "a"), Strategy.FULL, 0)
        assert t.steps == []
        assert t.final == Capsule("x", "a")

    def test_cbv_export(self):
        n = Cut(Export("x", Capsule("x", "a"), "a", "b"), "b", "z", Capsule("z", "g"))
        assert reduce(n, Strategy.CBV, 10).final == Export("x", Capsule("x", "a"), "a", "g")

    def test_budget(self):
        with pytest.raises(BudgetExceeded) as info:
            reduce(BOTH_FREE, Strategy.FULL, 1)
        assert len(info.value.trace.steps) == 1

    def test_negative_budget(self):
        with pytest.raises(ValueError):
            reduce(AX, Strategy.FULL, -1)

    @given(scoped_nets(6))
    def test_deterministic(self, net):
        def run():
            try:
                return str(reduce(net, Strategy.CBV, 30))
            except BudgetExceeded as e:
                return str(e.trace)

        assert run() == run()


class TestPaths:
    @pytest.mark.parametrize("path", [(), (0,), (1, 0, 1)])
    def test_round_trip(self, path):
        assert parse_path(format_path(path)) == path


def gc_distance(net, limit: int) -> int | None:
    """Fewest ordinary steps from ``net`` to the ``gc_renaming`` result, up to ``limit``."""
    goal = gc_renaming(net)
    frontier = [net]
    for d in range(limit + 1):
        if any(alpha_eq(q, goal) for q in frontier):
            return d
        frontier = [s for q in frontier for s in step_all(q)]
    return None


class TestShortcuts:
    def test_gc_left(self):
        n = CutL(Capsule("y", "b"), "a", "x", Capsule("x", "c"))
        assert shortcut_rule(n) is XRule.GC_L
        assert gc_renaming(n) == Capsule("y", "b")

    def test_gc_right(self):
        n = CutR(Capsule("y", "a"), "a", "x", Capsule("z", "c"))
        assert shortcut_rule(n) is XRule.GC_R
        assert gc_renaming(n) == Capsule("z", "c")

    def test_renaming(self):
        p = Export("u", Capsule("u", "d"), "d", "d2")
        n = Cut(Import(Capsule("v", "e"), "e", "y", "w", Capsule("w", "d")), "d", "z", Capsule("z", "a"))
        assert shortcut_rule(n) is XRule.REN_L
        assert alpha_eq(gc_renaming(n), Import(Capsule("v", "e"), "e", "y", "w", Capsule("w", "a")))
        assert shortcut_rule(Cut(p, "d2", "z", Capsule("z", "a"))) is XRule.REN_L

    def test_nothing_to_do(self):
        n = parse_xnet("exp(x; <x.a>; a).b")
        assert shortcut_rule(n) is None
        assert gc_renaming(n) == n

    def test_result_is_reachable(self):
        small = [n for k in range(1, 5) for n in enumerate_nets(k)]
        unreached = [n for n in small + [n for _, n in corpus_nets()] if gc_distance(n, 2 * size(n)) is None]
        assert unreached == []

    def test_reachability_can_exceed_size(self):
        net = parse_xnet("cut(<x.c> | c / u | cutL(<u.c> | c / v | <u.a>))", allow_active=True)
        assert alpha_eq(gc_renaming(net), parse_xnet("cutL(<x.c> | c / v | <x.a>)", allow_active=True))
        assert size(net) == 5
        assert gc_distance(net, 10) == 8

    def test_admissible_rules_never_in_core_search(self):
        for e in read_entries("rules.txt"):
            found = {r.rule for r in find_redexes(parse_xnet(e.text, allow_active=True))}
            assert not found & set(ADMISSIBLE)
