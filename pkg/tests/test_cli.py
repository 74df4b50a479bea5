from __future__ import annotations

import io
import subprocess
import sys

import pytest

from seqpi.cli import main

PEIRCE = "exp(z; imp(exp(y; <y.d> ; h).a | a / [z] / w | <w.d>); d).g"
UNTYPEABLE = "cut(<y.a> | a / x | imp(<x.b> | b / [x] / w | <w.c>))"


def run(*argv: str, stdin: str = "") -> tuple[int, str, str]:
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdin=io.StringIO(stdin), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


class TestTypecheck:
    def test_peirce(self):
        assert run("typecheck", "--calc", "x", PEIRCE) == (0, "|- g : ((A -> B) -> A) -> A\n", "")

    def test_corpus_entry(self):
        assert run("typecheck", "--calc", "x", "--entry", "peirce")[1] == "|- g : ((A -> B) -> A) -> A\n"

    def test_untypeable(self):
        code, out, err = run("typecheck", "--calc", "x", UNTYPEABLE)
        assert code == 1 and out == ""
        assert "untypeable" in err

    def test_explain(self):
        code, out, _ = run("typecheck", "--calc", "x", "--explain", PEIRCE)
        assert code == 0
        assert "  (imp) z : (A -> B) -> A |- d : A" in out.splitlines()

    def test_context(self, tmp_path):
        good = tmp_path / "good.ctx"
        good.write_text("sock x : A -> B\nplug a : A -> B\n")
        bad = tmp_path / "bad.ctx"
        bad.write_text("sock x : A\nplug a : B\n")
        assert run("typecheck", "--calc", "x", "--ctx", str(good), "<x.a>")[0] == 0
        assert run("typecheck", "--calc", "x", "--ctx", str(bad), "<x.a>")[0] == 1

    def test_pi_needs_context(self, tmp_path):
        assert run("typecheck", "--calc", "pi", "0")[0] == 2
        ctx = tmp_path / "fwd.ctx"
        ctx.write_text("in x : A\nout a : A\n")
        assert run("typecheck", "--calc", "pi", "--ctx", str(ctx), "x(o).a<o>") == (0, "x : A |- a : A\n", "")
        assert run("typecheck", "--calc", "pi", "--ctx", str(ctx), "x(o).x<o>")[0] == 1

    def test_lambda(self):
        assert run("typecheck", "--calc", "lam", r"\x y. x") == (0, "|- A -> B -> A\n", "")
        assert run("typecheck", "--calc", "lam", r"\x. x x")[0] == 1

    def test_bad_context_file(self, tmp_path):
        ctx = tmp_path / "broken.ctx"
        ctx.write_text("sock x A\n")
        assert run("typecheck", "--calc", "x", "--ctx", str(ctx), "<x.a>")[0] == 2
        assert run("typecheck", "--calc", "x", "--ctx", str(tmp_path / "missing"), "<x.a>")[0] == 2


class TestReduce:
    def test_cbn_axiom(self):
        assert run("reduce", "--calc", "x", "--strategy", "cbn", "cut(<y.a>|a/x|<x.b>)") == (0, ". Ax => <y.b>\n", "")

    def test_trace_lines(self):
        code, out, _ = run("reduce", "--calc", "x", "--strategy", "cbv", "cut(<x.a> | g / z | <y.b>)")
        assert code == 0
        assert out.splitlines() == [". ActL => cutL(<x.a> | g / z | <y.b>)", ". cap‡ => <x.a>"]

    def test_step_limit(self):
        code, out, err = run("reduce", "--calc", "x", "--max-steps", "1", "cut(<x.a> | g / z | <y.b>)")
        assert code == 0 and len(out.splitlines()) == 1
        assert "redexes remain" in err

    def test_interactive(self):
        code, out, _ = run("reduce", "--calc", "x", "--interactive", "cut(<x.a> | g / z | <y.b>)", stdin="2\n1\n")
        assert code == 0
        assert out.rstrip().endswith(". ‡cap => <y.b>")
        assert "[2] . ActR" in out

    def test_interactive_stops_on_eof(self):
        code, out, _ = run("reduce", "--calc", "x", "--interactive", "cut(<x.a> | g / z | <y.b>)", stdin="")
        assert code == 0 and "=>" not in out

    def test_pi(self):
        code, out, _ = run("reduce", "--calc", "pi", "a<b> | a(x).x<c>")
        assert code == 0
        assert out.splitlines()[-1].endswith("=> b<c>")

    def test_pi_rejects_strategy(self):
        assert run("reduce", "--calc", "pi", "--strategy", "cbn", "0")[0] == 2

    def test_active_cuts_need_flag(self):
        assert run("reduce", "--calc", "x", "cutL(<y.a> | a / x | <x.b>)")[0] == 2
        assert run("reduce", "--calc", "x", "--allow-active", "cutL(<y.a> | a / x | <x.b>)")[0] == 0


class TestEncode:
    def test_x_to_pi(self):
        assert run("encode", "--from", "x", "--to", "pi", "<x.a>") == (0, "x(o#1).a<o#1>\n", "")

    def test_lam_to_x(self):
        assert run("encode", "--from", "lam", "--to", "x", "--plug", "g", r"\x. x") == (0, "exp(x; <x.b#1>; b#1).g\n", "")

    def test_lam_to_pi(self):
        assert run("encode", "--from", "lam", "--to", "pi", "y")[1] == "y(o#1).a<o#1>\n"

    def test_unsupported_pair(self):
        assert run("encode", "--from", "x", "--to", "x", "<x.a>")[0] == 2
        assert run("encode", "--from", "x", "--to", "pi", "--plug", "g", "<x.a>")[0] == 2


class TestSimulate:
    def test_axiom(self):
        code, out, _ = run("simulate", "--step", "./Ax", "cut(<y.a>|a/x|<x.b>)")
        assert code == 0
        assert out.splitlines()[0] == "STEP: ./Ax => <y.b>"
        assert out.splitlines()[-1] == "SIMULATES: yes (depth=8, budget=2, sim-depth=3, rounds=2)"
        assert any(line.startswith("STEP 0: ") for line in out.splitlines())

    def test_single_redex_needs_no_step(self):
        assert run("simulate", "cut(<y.a>|a/x|<x.b>)")[0] == 0

    def test_ambiguous_step(self):
        code, _, err = run("simulate", "cut(<x.a> | g / z | <y.b>)")
        assert code == 2 and "./ActL" in err

    def test_rule_aliases(self):
        assert run("simulate", "--step", "./act_l", "cut(<x.a> | g / z | <y.b>)")[0] == 0

    def test_missing_redex(self):
        assert run("simulate", "--step", "./ExpRen", "cut(<y.a>|a/x|<x.b>)")[0] == 2

    def test_bounds_too_small(self):
        code, out, _ = run("simulate", "--depth", "0", "--sim-depth", "0", "--strict", "cut(<y.a>|a/x|<x.b>)")
        assert code == 1
        assert "SIMULATES: no" in out


class TestInput:
    def test_stdin(self):
        assert run("typecheck", "--calc", "x", "--file", "-", stdin=PEIRCE)[0] == 0

    def test_file_with_comments(self, tmp_path):
        f = tmp_path / "net.x"
        f.write_text("-- Peirce\n" + PEIRCE + "\n")
        assert run("typecheck", "--calc", "x", "--file", str(f))[0] == 0

    def test_no_source(self):
        assert run("typecheck", "--calc", "x")[0] == 2

    def test_two_sources(self):
        assert run("typecheck", "--calc", "x", "--entry", "peirce", PEIRCE)[0] == 2

    def test_parse_error(self):
        code, _, err = run("typecheck", "--calc", "x", "cut(<y.a>|")
        assert code == 2 and "parse error" in err

    def test_unknown_entry(self):
        assert run("typecheck", "--calc", "x", "--entry", "nope")[0] == 2

    def test_bad_flag(self):
        assert run("reduce", "--calc", "x", "--strategy", "lazy", "<x.a>")[0] == 2
        assert run("frobnicate")[0] == 2
        assert run("simulate", "--depth", "-1", "<x.a>")[0] == 2


class TestCheck:
    def test_x(self):
        assert run("check", "--calc", "x", PEIRCE) == (0, f"{PEIRCE.replace(' ; ', '; ')}\nfree sockets: -\nfree plugs: g\n", "")

    def test_with_context(self, tmp_path):
        ctx = tmp_path / "c"
        ctx.write_text("plug g : ((A -> B) -> A) -> A\n")
        code, out, _ = run("check", "--calc", "x", "--ctx", str(ctx), PEIRCE)
        assert code == 0 and out.endswith("|- g : ((A -> B) -> A) -> A\n")

    def test_pi_and_lam(self):
        assert run("check", "--calc", "pi", "new a.a<b>")[1] == "new a.a<b>\nfree names: b\n"
        assert run("check", "--calc", "lam", "f x")[1] == "f x\nfree variables: f x\n"


class TestCorpus:
    def test_run_selected(self):
        code, out, _ = run("corpus-run", "--only", "1,2,3")
        lines = out.splitlines()
        assert code == 0
        assert [line[:8] for line in lines[:3]] == ["PASS [ 1", "PASS [ 2", "PASS [ 3"]
        assert lines[-1] == "3/3 criteria passed (seed 20240607)"

    def test_bad_selection(self):
        assert run("corpus-run", "--only", "12")[0] == 2
        assert run("corpus-run", "--only", "x")[0] == 2

    def test_gen_respects_env(self, monkeypatch):
        monkeypatch.setenv("SEQPI_SEED", "5")
        a = run("corpus-gen")[1]
        monkeypatch.setenv("SEQPI_SEED", "6")
        b = run("corpus-gen")[1]
        assert a != b
        assert "seed 5" in a and "seed 6" in b
        monkeypatch.setenv("SEQPI_SEED", "oops")
        assert run("corpus-gen")[0] == 2

    def test_gen_writes_files(self, tmp_path):
        assert run("corpus-gen", "--seed", "9", "--out", str(tmp_path))[0] == 0
        assert (tmp_path / "generated.txt").read_text().startswith("-- generated typed nets, seed 9")


def test_reports_are_byte_identical():
    argv = ("simulate", "--step", "./ActR", "cut(<x.a> | g / z | <y.b>)")
    assert run(*argv) == run(*argv)


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "seqpi", "reduce", "--calc", "x", "--strategy", "cbn", "cut(<y.a>|a/x|<x.b>)"],
        capture_output=True,
        text=True,
        stdin=subprocess.DEVNULL,
        timeout=60,
    )
    assert proc.returncode == 0
    assert proc.stdout == ". Ax => <y.b>\n"


@pytest.mark.parametrize("argv", [["--version"], ["typecheck", "--help"]])
def test_help_and_version_exit_zero(argv, capsys):
    assert main(argv) == 0


def test_byte_identical_across_processes():
    argv = [sys.executable, "-m", "seqpi", "simulate", "--step", "./ActR", "cut(<x.a> | g / z | <y.b>)"]
    outputs = {
        subprocess.run(argv, capture_output=True, env={"PYTHONHASHSEED": seed, "PATH": ""}, stdin=subprocess.DEVNULL, timeout=60).stdout
        for seed in ("1", "2", "3")
    }
    assert len(outputs) == 1
    assert outputs.pop().endswith(b"SIMULATES: yes (depth=8, budget=2, sim-depth=3, rounds=2)\n")
