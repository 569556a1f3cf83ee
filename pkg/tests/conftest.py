import numpy as np
import pytest

from oblique_rmu.manifold import random_point
from oblique_rmu.model import GramCache, ProblemInstance


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_instance(rng, m, n, r, lam=None):
    W = rng.random((m, r))
    X = rng.random((m, n))
    if lam is None:
        lam = float(rng.random())
    inst = ProblemInstance(X, W, lam)
    return inst, GramCache.from_instance(inst)


def random_positive_point(rng, r, n):
    return random_point(rng, r, n, nonnegative=True)


# acceptance reporting: one line per criterion at the end of the session
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
