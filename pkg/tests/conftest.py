import numpy as np
import pytest

from legopt.dynamics import DynamicsParams
from legopt.geometry import MaterialParams, initial_geometry
from legopt.trajectory import plan_swing


@pytest.fixture(scope="session")
def material():
    return MaterialParams()


@pytest.fixture(scope="session")
def geom():
    return initial_geometry()


@pytest.fixture(scope="session")
def params(geom):
    return DynamicsParams.from_geometry(geom)


@pytest.fixture(scope="session")
def traj():
    return plan_swing()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


_ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion."""

    def record(number: int, title: str, passed: bool, detail: str) -> bool:
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2} {title}: {detail}"
        _ACCEPTANCE[number] = line
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[n])
