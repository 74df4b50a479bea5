from __future__ import annotations

import random

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from seqpi.corpus import NetGenerator, random_lambda
from seqpi.encode import LamUntypeable, infer_lam
from seqpi.oracles import random_net, random_process
from seqpi.xtypes import Untypeable, infer_x

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much])
settings.load_profile("default")

seeds = st.integers(0, 2**32 - 1)


@st.composite
def nets(draw, max_size: int = 8):
    return random_net(random.Random(draw(seeds)), draw(st.integers(1, max_size)))


def _typeable(net) -> bool:
    try:
        infer_x(net)
    except Untypeable:
        return False
    return True


@st.composite
def scoped_nets(draw, max_size: int = 8):
    """Nets whose binders tend to be used; often typeable."""
    return NetGenerator(random.Random(draw(seeds))).net(draw(st.integers(1, max_size)), [], [])


def typed_nets(max_size: int = 8):
    return scoped_nets(max_size).filter(_typeable)


@st.composite
def processes(draw, max_size: int = 6):
    return random_process(random.Random(draw(seeds)), draw(st.integers(1, max_size)))


def _lam_typeable(m) -> bool:
    try:
        infer_lam(m)
    except LamUntypeable:
        return False
    return True


@st.composite
def lambdas(draw, max_size: int = 7):
    return random_lambda(random.Random(draw(seeds)), draw(st.integers(1, max_size)), [], [0])


def typed_lambdas(max_size: int = 7):
    return lambdas(max_size).filter(_lam_typeable)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
