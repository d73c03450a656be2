import numpy as np
import pytest

from pmeans.measures import PiecewiseLinearDensity, TrigPolyDensity, VonMisesMixture

ACCEPTANCE_LINES = []


def record(line):
    """Collect an acceptance verdict line; echoed in the terminal summary."""
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def bimodal():
    return VonMisesMixture((0.0, 2.5), (6.0, 6.0), (0.65, 0.35))


@pytest.fixture(scope="session")
def trig():
    return TrigPolyDensity(cos=(0.5, 0.2), sin=(0.1, -0.3))


@pytest.fixture(scope="session")
def trimodal():
    return VonMisesMixture((-2.0, 0.3, 2.2), (3.0, 5.0, 2.0), (0.3, 0.5, 0.2))


@pytest.fixture(scope="session")
def piecewise():
    return PiecewiseLinearDensity(tuple(1.0 + 0.5 * np.sin(np.arange(16))))


@pytest.fixture(scope="session")
def smooth_measures(bimodal, trig, trimodal):
    return {"bimodal": bimodal, "trig": trig, "trimodal": trimodal}
