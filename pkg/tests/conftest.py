import cmath
import math

import numpy as np
import pytest
from hypothesis import settings

from etahat.checks import build_pipeline
from etahat.curves import curve_from_roots, elliptic_curve

settings.register_profile("etahat", deadline=None, max_examples=25, derandomize=True)
settings.load_profile("etahat")

GENUS2_ROOTS = [-2, -1, 0, 1, 2]
GENUS3_ROOTS = [-3, -2, -1, 0, 1, 2, 3]
COMPLEX_GENUS2_ROOTS = [-2, -1j, 0.5, 1 + 1j, 2]


@pytest.fixture(scope="session")
def genus2():
    return curve_from_roots(GENUS2_ROOTS)


@pytest.fixture(scope="session")
def genus3():
    return curve_from_roots(GENUS3_ROOTS)


@pytest.fixture(scope="session")
def genus2_kernels(genus2):
    return build_pipeline(genus2)


@pytest.fixture(scope="session")
def genus3_kernels(genus3):
    return build_pipeline(genus3)


@pytest.fixture(scope="session")
def torus_kernels():
    return build_pipeline(elliptic_curve(0.3 + 1.2j))


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)


def direct_theta1(z, tau, terms=500):
    """Plain-Python partial sum of the theta1 q-series, used as an oracle."""
    q = cmath.exp(1j * math.pi * tau)
    total = 0j
    for n in range(terms):
        total += 2 * (-1) ** n * q ** ((n + 0.5) ** 2) * cmath.sin((2 * n + 1) * math.pi * z)
    return total


def pytest_terminal_summary(terminalreporter):
    from tests import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
