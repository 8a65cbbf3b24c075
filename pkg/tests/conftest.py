from importlib import resources

import numpy as np
import pytest

from ivexp.ctmc import validate_generator

Q_LOWER = np.array([[-7.0, 4.0, 0.0], [2.0, -4.0, 1.0], [0.0, 3.0, -6.0]])
Q_UPPER = np.array([[-5.0, 5.0, 2.0], [3.0, -3.0, 2.0], [1.0, 4.0, -4.0]])


@pytest.fixture(scope="session")
def fixture_path():
    return str(resources.files("ivexp") / "data" / "imprecise_ctmc_3state.json")


@pytest.fixture(scope="session")
def generator():
    return validate_generator(Q_LOWER, Q_UPPER)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)

# printed 4-decimal transition bounds at t = 0.2
P_LOWER_80 = np.array([[0.3164, 0.3839, 0.0421], [0.1545, 0.5826, 0.0927], [0.0635, 0.3340, 0.4019]])
P_UPPER_80 = np.array([[0.4945, 0.4984, 0.2338], [0.2864, 0.6921, 0.2338], [0.1853, 0.4432, 0.5323]])
P_LOWER_200 = np.array([[0.3181, 0.3830, 0.0420], [0.1541, 0.5836, 0.0924], [0.0633, 0.3332, 0.4033]])
P_UPPER_200 = np.array([[0.4957, 0.4972, 0.2333], [0.2858, 0.6928, 0.2333], [0.1849, 0.4421, 0.5334]])


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("tests.test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.RESULTS):
            terminalreporter.write_line(line)
