import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from deltah.harness.generate import GenConfig, case_rng, gen_pcf, gen_well_typed
from deltah.parser import parse, parse_type
from deltah.prelude import prelude

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def defs():
    return prelude()


def P(text):
    return parse(text, prelude())


def T(text):
    return parse_type(text, prelude())


seeds = st.integers(min_value=0, max_value=2**31)


@st.composite
def pcf_terms(draw, depth=4):
    return gen_pcf(random.Random(draw(seeds)), depth=depth)


@st.composite
def typed_terms(draw, goal="any"):
    seed = draw(seeds)
    return gen_well_typed(GenConfig(max_depth=3), case_rng(seed, 0), goal=goal)


# criterion number -> result line, filled by test_acceptance.py
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
