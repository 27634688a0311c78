import numpy as np
import pytest

from weinorman.lie_core import build_su_basis


@pytest.fixture(scope="session")
def su2():
    return build_su_basis(2)


@pytest.fixture(scope="session")
def su3():
    return build_su_basis(3)


@pytest.fixture(scope="session")
def su4():
    return build_su_basis(4)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.RESULTS[number])
