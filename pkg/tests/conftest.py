import numpy as np
import pytest

from photonbound.modes import build_grid

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def tiny_grid():
    """K = 16 modes."""
    return build_grid(2, 2)


@pytest.fixture(scope="session")
def small_grid():
    """K = 64 modes."""
    return build_grid(4, 4)


@pytest.fixture(scope="session")
def fine_grid():
    return build_grid(32, 16)


@pytest.fixture
def acceptance_log():
    def log(criterion, passed, detail):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {criterion}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return log


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
