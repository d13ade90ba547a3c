import numpy as np
import pytest
from hypothesis import settings

from ci_opt.problems import ProblemSpec

settings.register_profile("ci_opt", deadline=None, max_examples=100)
settings.load_profile("ci_opt")


def _sphere_f(X):
    return (X**2).sum(axis=1)


def _no_constraints(X):
    return np.zeros((X.shape[0], 0))


def _box_f(X):
    return X[:, 0] + X[:, 1]


def _box_g(X):
    # feasible when x0 + x1 >= 1
    return (1.0 - X[:, 0] - X[:, 1])[:, np.newaxis]


def make_sphere():
    return ProblemSpec("sphere", [-1.0, -1.0], [1.0, 1.0], "minimize", _sphere_f, _no_constraints, 0)


@pytest.fixture
def sphere():
    return make_sphere()


@pytest.fixture
def halfplane():
    return ProblemSpec("halfplane", [0.0, 0.0], [1.0, 1.0], "minimize", _box_f, _box_g, 1)


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.LINES:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.LINES:
            terminalreporter.write_line(line)
