import math

import numpy as np
import pytest

from darkcavity.params import fig2_params, fig4_params

ACCEPTANCE_LINES = []

PHI_DARK1 = math.asin(-1 / math.sqrt(5))
PHI_DARK2 = math.atan(0.5)
PHI_DARK2_ATOMS = math.acos(-2 / (5 * math.sqrt(5)))


@pytest.fixture
def fig2():
    return fig2_params()


@pytest.fixture
def fig4():
    return fig4_params()


@pytest.fixture
def rng():
    return np.random.default_rng(20161014)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
