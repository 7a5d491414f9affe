import numpy as np
import pytest

from pscontract.fiber import trivial_character
from pscontract.liealg import build_sl
from pscontract.reps import PrincipalSeriesParams


@pytest.fixture(scope="session")
def sl2():
    return build_sl(2)


@pytest.fixture(scope="session")
def sl3():
    return build_sl(3)


@pytest.fixture(scope="session")
def sl4():
    return build_sl(4)


def sl2_elements(alg):
    """Coordinates of H = diag(1, -1), E = e12, F = e21."""
    H = alg.coords(np.diag([1.0, -1.0]))
    E = alg.coords(np.array([[0.0, 1.0], [0.0, 0.0]]))
    F = alg.coords(np.array([[0.0, 0.0], [1.0, 0.0]]))
    return H, E, F


@pytest.fixture(scope="session")
def p2(sl2):
    return PrincipalSeriesParams(sl2, sl2.coords(np.diag([1.0, -1.0])), trivial_character())


@pytest.fixture(scope="session")
def p3(sl3):
    return PrincipalSeriesParams(sl3, sl3.coords(np.diag([2.0, 1.0, -3.0])), trivial_character())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import LINES
    except ImportError:
        return
    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
