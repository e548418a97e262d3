import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from framekit import canonical_dual, fixture

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

ACCEPTANCE_LINES = []


@pytest.fixture
def E2():
    return fixture("E2")


@pytest.fixture
def M3():
    return fixture("M3")


@pytest.fixture
def U3():
    return fixture("U3")


@pytest.fixture
def U3_pair():
    return canonical_dual(fixture("U3"))


@pytest.fixture
def M3_pair():
    return canonical_dual(fixture("M3"))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
