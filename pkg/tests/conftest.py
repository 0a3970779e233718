import numpy as np
import pytest

from setgeom.spaces import Euclidean, Hyperbolic, NormedLp

SPACES = [Euclidean(1), Euclidean(2), Euclidean(3), Hyperbolic(2), Hyperbolic(3), NormedLp(2, 3.0), NormedLp(3, 1.5)]


@pytest.fixture(params=SPACES, ids=str)
def space(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
