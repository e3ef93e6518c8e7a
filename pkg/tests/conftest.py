import pytest

from painlab.series import ProblemParams


@pytest.fixture
def params_mu1():
    """The classical equation y'' = 6y² - x at 30 digits."""
    return ProblemParams.create(1, digits=30)


@pytest.fixture
def params_mu157():
    return ProblemParams.create("15/7", digits=20)


@pytest.fixture
def params_mu2():
    """mu = 2, where y = -x/√6 solves the equation exactly."""
    return ProblemParams.create(2, digits=30)


def close(a, b, tol) -> bool:
    return abs(a - b) <= tol
