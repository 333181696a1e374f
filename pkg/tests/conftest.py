import numpy as np
import pytest

from tomolab.seeding import stream
from tomolab.states import random_state


@pytest.fixture
def rng():
    return stream(12345, 0)


def full_rank_state(d, rng):
    return random_state(d, rng.dirichlet(np.ones(d)), rng)


_CRITERIA: list[str] = []


@pytest.fixture(scope="session")
def criterion_log():
    """Collects one summary line per acceptance criterion."""
    return _CRITERIA


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA:
            terminalreporter.write_line(line)
