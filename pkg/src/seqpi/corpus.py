"""Bundled example nets and lambda terms, plus seeded generators.

Corpus files live in the ``corpus`` directory of the package. Each
non-blank line is ``name: term``; lines starting with ``--`` are comments.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .encode import (
    Abs,
    App,
    LamTerm,
    LamUntypeable,
    Var,
    beta_steps,
    infer_lam,
    lam_alpha_key,
    parse_lam,
    print_lam,
)
from .xrewrite import find_redexes
from .xsyntax import Capsule, Cut, Export, Import, XNet, parse_xnet, print_xnet
from .xtypes import Untypeable, infer_x

DEFAULT_SEED = 20240607
SEED_ENV = "SEQPI_SEED"


def seed_from_env(default: int = DEFAULT_SEED) -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None or not raw.strip():
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


@dataclass(frozen=True)
class Entry:
    name: str
    text: str
    group: str


def _corpus_dir():
    return resources.files("seqpi") / "corpus"


def read_entries(filename: str, group: str | None = None) -> list[Entry]:
    text = (_corpus_dir() / filename).read_text(encoding="utf-8")
    return parse_entries(text, group or Path(filename).stem)


def parse_entries(text: str, group: str) -> list[Entry]:
    entries = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("--"):
            continue
        name, sep, body = line.partition(":")
        if not sep:
            raise ValueError(f"{group} line {lineno}: expected 'name: term'")
        entries.append(Entry(name.strip(), body.strip(), group))
    return entries


def corpus_nets() -> list[tuple[Entry, XNet]]:
    """Every bundled X net (intro cuts, Peirce, per-rule examples, generated)."""
    out = []
    for filename in ("intro.txt", "peirce.txt", "rules.txt", "generated.txt"):
        for e in read_entries(filename):
            out.append((e, parse_xnet(e.text, allow_active=True)))
    return out


def corpus_lambda() -> list[tuple[Entry, LamTerm]]:
    out = []
    for filename in ("lambda.txt", "lambda_generated.txt"):
        for e in read_entries(filename):
            out.append((e, parse_lam(e.text)))
    return out


def intro_cuts() -> list[tuple[Entry, XNet]]:
    return [(e, parse_xnet(e.text)) for e in read_entries("intro.txt")]


def peirce() -> XNet:
    return parse_xnet(read_entries("peirce.txt")[0].text)


# --------------------------------------------------------------------------
# generators


SOCKETS = ("x", "y")
PLUGS = ("a", "b")


class NetGenerator:
    """Random nets whose bound connectors tend to be used.

    Free names come from small pools so that cuts often meet their
    connectors; binders get fresh names ``s1, s2, ...`` / ``p1, p2, ...``.
    """

    def __init__(self, rng: random.Random) -> None:
        self.rng = rng
        self.count = 0

    def _fresh(self, base: str) -> str:
        self.count += 1
        return f"{base}{self.count}"

    def net(self, size: int, socks: list[str], plugs: list[str]) -> XNet:
        rng = self.rng

        def pick(scope: list[str], pool: tuple[str, ...]) -> str:
            if scope and rng.random() < 0.8:
                return rng.choice(scope)
            return rng.choice(pool)

        if size <= 1:
            return Capsule(pick(socks, SOCKETS), pick(plugs, PLUGS))
        if size == 2:
            x, a = self._fresh("s"), self._fresh("p")
            return Export(x, self.net(1, socks + [x], plugs + [a]), a, pick(plugs, PLUGS))
        kind = rng.choice(("export", "import", "cut", "cut", "cut"))
        if kind == "export":
            x, a = self._fresh("s"), self._fresh("p")
            return Export(x, self.net(size - 1, socks + [x], plugs + [a]), a, pick(plugs, PLUGS))
        left_size = rng.randint(1, size - 2)
        right_size = size - 1 - left_size
        a, x = self._fresh("p"), self._fresh("s")
        left = self.net(left_size, socks, plugs + [a])
        right = self.net(right_size, socks + [x], plugs)
        if kind == "import":
            return Import(left, a, pick(socks, SOCKETS), x, right)
        return Cut(left, a, x, right)


def generate_typed_nets(
    seed: int, count: int, max_size: int, min_size: int = 2, need_redex: bool = False
) -> list[XNet]:
    """``count`` distinct typeable nets with sizes in ``[min_size, max_size]``."""
    rng = random.Random(seed)
    gen = NetGenerator(rng)
    seen: set[str] = set()
    out: list[XNet] = []
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 200 * count:
            raise RuntimeError("generator could not find enough typeable nets")
        net = gen.net(rng.randint(min_size, max_size), [], [])
        text = print_xnet(net)
        if text in seen or (need_redex and not find_redexes(net)):
            continue
        try:
            infer_x(net)
        except Untypeable:
            continue
        seen.add(text)
        out.append(net)
    return out


def random_lambda(rng: random.Random, size: int, scope: list[str], counter: list[int]) -> LamTerm:
    if size <= 1:
        pool = scope or ["u", "v"]
        return Var(rng.choice(pool))
    choice = rng.random()
    if size >= 3 and choice < 0.45:
        # a beta redex
        counter[0] += 1
        x = f"z{counter[0]}"
        fun_size = rng.randint(1, size - 2)
        body = random_lambda(rng, fun_size, scope + [x], counter)
        arg = random_lambda(rng, max(1, size - 2 - fun_size), scope, counter)
        return App(Abs(x, body), arg)
    if choice < 0.75 or size == 2:
        counter[0] += 1
        x = f"z{counter[0]}"
        return Abs(x, random_lambda(rng, size - 1, scope + [x], counter))
    left = rng.randint(1, size - 2)
    return App(random_lambda(rng, left, scope, counter), random_lambda(rng, size - 1 - left, scope, counter))


def generate_typed_lambda(seed: int, count: int, max_size: int, need_redex: bool = True) -> list[LamTerm]:
    rng = random.Random(seed)
    seen: set[tuple] = set()
    out: list[LamTerm] = []
    attempts = 0
    counter = [0]
    while len(out) < count:
        attempts += 1
        if attempts > 500 * count:
            raise RuntimeError("generator could not find enough typeable terms")
        m = random_lambda(rng, rng.randint(2, max_size), [], counter)
        shape = lam_alpha_key(m)
        if shape in seen or (need_redex and not beta_steps(m)):
            continue
        try:
            infer_lam(m)
        except LamUntypeable:
            continue
        seen.add(shape)
        out.append(m)
    return out


GENERATED_NETS = 50
GENERATED_MAX_SIZE = 6
GENERATED_LAMBDA = 50
GENERATED_LAMBDA_MAX_SIZE = 6


def render_generated(seed: int) -> tuple[str, str]:
    """Contents of the two generated corpus files for ``seed``."""
    nets = generate_typed_nets(seed, GENERATED_NETS, GENERATED_MAX_SIZE, min_size=3, need_redex=True)
    lines = [f"-- generated typed nets, seed {seed}, sizes 3..{GENERATED_MAX_SIZE}, each with a redex"]
    lines += [f"gen{i:02d}: {print_xnet(n)}" for i, n in enumerate(nets)]
    terms = generate_typed_lambda(seed, GENERATED_LAMBDA, GENERATED_LAMBDA_MAX_SIZE)
    lam_lines = [f"-- generated simply typed terms with a redex, distinct up to alpha, seed {seed}"]
    lam_lines += [f"lgen{i:02d}: {print_lam(m)}" for i, m in enumerate(terms)]
    return "\n".join(lines) + "\n", "\n".join(lam_lines) + "\n"


def write_generated(seed: int, directory: Path) -> None:
    nets, lams = render_generated(seed)
    (directory / "generated.txt").write_text(nets, encoding="utf-8")
    (directory / "lambda_generated.txt").write_text(lams, encoding="utf-8")
