import numpy as np
import pytest

from darboux_monodromy.curves import Circle, figure1, figure2
from darboux_monodromy.monodromy import sweep
from darboux_monodromy.polarised import PolarisedCurve
from darboux_monodromy.space_forms import SpaceForm

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def fig1():
    return PolarisedCurve(figure1(), np.pi, SpaceForm.curved(1.0))


@pytest.fixture(scope="session")
def fig2():
    return PolarisedCurve(figure2(), 2 * np.pi)


@pytest.fixture(scope="session")
def circle():
    return PolarisedCurve(Circle(), 2 * np.pi)


@pytest.fixture(scope="session")
def fig1_sweep(fig1):
    return sweep(fig1, -0.5 + 1e-3, 3.0, 1500, 4096)


@pytest.fixture(scope="session")
def fig2_sweep(fig2):
    return sweep(fig2, 1e-3, 8.0, 1500, 4096)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
