"""Shared fixtures: reference PU vectors and the criterion report hook."""

import numpy as np
import pytest

from puesim.env import PuModel

# Reference 10-channel activity vectors used across the experiment tests.
PI = np.array([0.85, 0.85, 0.38, 0.51, 0.21, 0.13, 0.87, 0.7, 0.32, 0.95])
P01 = np.array([0.76, 0.06, 0.3, 0.24, 0.1, 0.1, 0.01, 0.95, 0.94, 0.55])
P10 = np.array([0.14, 0.43, 0.23, 0.69, 0.22, 0.59, 0.21, 0.58, 0.34, 0.73])
P1 = np.array([0.53, 0.18, 0.88, 0.66, 0.23, 0.87, 0.48, 0.44, 0.45, 0.88])


@pytest.fixture(scope="session")
def pu_iid():
    return PuModel.iid(PI)


@pytest.fixture(scope="session")
def pu_markov():
    return PuModel.markov(P01, P10, P1)


# One line per acceptance criterion, echoed in the terminal summary so the
# pass/fail verdicts survive pytest's output capture. The state lives in
# tests._criteria because this file is imported twice under different
# module names (``conftest`` by pytest, ``tests.conftest`` by the tests).
from tests._criteria import CRITERION_LINES, record_criterion  # noqa: E402,F401


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in CRITERION_LINES:
            terminalreporter.write_line(line)
