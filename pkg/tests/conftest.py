import numpy as np
import pytest

from modineq.algebra import Algebra, NormalFunctional
from modineq.rng import CounterRNG
from modineq.sampling import random_functional


def functional(*blocks) -> NormalFunctional:
    """Normal functional from per-block density matrices (lists or arrays)."""
    dens = tuple(np.atleast_2d(np.asarray(b, dtype=complex)) for b in blocks)
    return NormalFunctional(Algebra(tuple(d.shape[0] for d in dens)), dens)


@pytest.fixture
def rng():
    return CounterRNG(20240611)


@pytest.fixture
def random_pair(rng):
    algebra = Algebra.of(2, 3)
    return random_functional(rng, algebra), random_functional(rng, algebra)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
