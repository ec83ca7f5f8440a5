import numpy as np
import pytest

from gatecert.gates import NAMED_GATES

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def cnot():
    return NAMED_GATES["cnot"].copy()


@pytest.fixture
def swap():
    return NAMED_GATES["swap"].copy()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
