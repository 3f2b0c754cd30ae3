import numpy as np
import pytest

from waveop.checks import random_problem
from waveop.core import PerturbationProblem, Spectrum

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(42)


@pytest.fixture
def two_level():
    """h0 = (0, 1), off-diagonal coupling c = 0.3."""
    return PerturbationProblem(Spectrum([0.0, 1.0]), [[0.0, 0.3], [0.3, 0.0]])


@pytest.fixture
def random_problems():
    rng = np.random.default_rng(7)
    return [random_problem(rng) for _ in range(25)]


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
