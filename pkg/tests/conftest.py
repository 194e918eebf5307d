import numpy as np
import pytest
from hypothesis import settings

from ncdipole import hydrogen_preset

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def hydrogen():
    return hydrogen_preset(100e-9)


def rel(a, b):
    """Max-norm relative difference."""
    a, b = np.asarray(a), np.asarray(b)
    scale = max(np.max(np.abs(b)), np.finfo(float).tiny)
    return float(np.max(np.abs(a - b)) / scale)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
