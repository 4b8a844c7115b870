import itertools
import math

import numpy as np
import pytest

from modineq.algebra import Algebra
from modineq.chernoff import (
    TestingInstance,
    bayes_error,
    chernoff_q,
    exponent_convergence,
    golden_section,
    minimize_q,
    split_classical,
    tensor_power,
)
from modineq.errors import InputError
from modineq.rng import CounterRNG
from modineq.sampling import random_functional

from conftest import functional


def classical_exponent(p, q):
    """Scalar brute force: grid with step 1e-4, then a fine local grid."""
    p, q = np.asarray(p), np.asarray(q)
    grid = np.linspace(0, 1, 10001)
    vals = np.array([(p**s * q ** (1 - s)).sum() for s in grid])
    i = int(np.argmin(vals))
    fine = np.linspace(grid[max(i - 1, 0)], grid[min(i + 1, 10000)], 20001)
    return -math.log(min((p**s * q ** (1 - s)).sum() for s in fine))


def classical_bayes(p, q, n, prior=0.5):
    """Exhaustive sum over outcome strings of min(prior p^n(x), (1-prior) q^n(x))."""
    total = 0.0
    for x in itertools.product(range(len(p)), repeat=n):
        a = prior * math.prod(p[i] for i in x)
        b = (1 - prior) * math.prod(q[i] for i in x)
        total += min(a, b)
    return total


def state(rng, n):
    f = random_functional(rng, Algebra.of(n))
    return f / f.mass


class TestQ:
    def test_equal(self):
        rho = state(CounterRNG(1), 3)
        for s in (0.0, 0.3, 1.0):
            assert chernoff_q(rho, rho, s) == pytest.approx(1.0, rel=1e-12)

    def test_orthogonal_pure(self):
        assert chernoff_q(functional(np.diag([1.0, 0.0])), functional(np.diag([0.0, 1.0])), 0.5) == 0

    def test_classical(self):
        assert chernoff_q(functional(np.diag([0.6, 0.4])), functional(np.diag([0.5, 0.5])), 0.5) == pytest.approx(
            np.sqrt(0.3) + np.sqrt(0.2), rel=1e-14)


class TestMinimize:
    def test_equal(self):
        rho = state(CounterRNG(2), 2)
        assert minimize_q(rho, rho).exponent == pytest.approx(0.0, abs=1e-12)

    def test_orthogonal(self):
        res = minimize_q(functional(np.diag([1.0, 0.0])), functional(np.diag([0.0, 1.0])))
        assert res.infinite and res.to_dict()["exponent"] == "infinite"

    @pytest.mark.parametrize("p, q", [
        ([0.6, 0.4], [0.5, 0.5]),
        ([0.7, 0.2, 0.1], [0.1, 0.3, 0.6]),
        ([0.97, 0.03], [0.02, 0.98]),
    ])
    def test_classical_brute_force(self, p, q):
        res = minimize_q(functional(np.diag(p)), functional(np.diag(q)))
        assert res.exponent == pytest.approx(classical_exponent(p, q), rel=1e-8)

    def test_golden_section_parabola(self):
        x, fx = golden_section(lambda t: (t - 0.3141) ** 2, 0.0, 1.0, 1e-10)
        assert x == pytest.approx(0.3141, abs=1e-9) and fx <= 1e-18


class TestBayes:
    def test_equal_states(self):
        rho = state(CounterRNG(3), 2)
        for p in (0.5, 0.3):
            assert bayes_error(TestingInstance(rho, rho, p), 2) == pytest.approx(min(p, 1 - p), rel=1e-12)

    def test_orthogonal(self):
        inst = TestingInstance(functional(np.diag([1.0, 0.0])), functional(np.diag([0.0, 1.0])))
        assert bayes_error(inst, 1) == pytest.approx(0.0, abs=1e-15)

    def test_classical_three_copies(self):
        p, q = [0.6, 0.4], [0.5, 0.5]
        inst = TestingInstance(functional(np.diag(p)), functional(np.diag(q)))
        assert bayes_error(inst, 3) == pytest.approx(classical_bayes(p, q, 3), rel=1e-12)

    def test_quantum_single_copy(self):
        # Helstrom: (1 - ||rho - sigma||_1 / 2) / 2
        rng = CounterRNG(4)
        rho, sigma = state(rng, 2), state(rng, 2)
        dist = np.abs(np.linalg.eigvalsh(rho.densities[0] - sigma.densities[0])).sum()
        assert bayes_error(TestingInstance(rho, sigma), 1) == pytest.approx(0.5 * (1 - 0.5 * dist), rel=1e-12)

    def test_tensor_power(self):
        f = functional(np.diag([0.25, 0.75]), [[0.5]])
        t = tensor_power(f, 2)
        assert t.algebra.blocks == (4, 2, 2, 1)
        assert t.mass == pytest.approx(f.mass**2)

    def test_cap(self):
        with pytest.raises(InputError):
            tensor_power(state(CounterRNG(5), 4), 6)

    def test_split_classical(self):
        f = split_classical(functional(np.diag([0.2, 0.8]), [[1.0]]))
        assert f.algebra.blocks == (1, 1, 1)

    def test_instance_validation(self):
        rho = functional(np.diag([0.6, 0.4]))
        with pytest.raises(InputError):
            TestingInstance(rho, 2 * rho)
        with pytest.raises(InputError):
            TestingInstance(rho, rho, 1.0)


class TestConvergence:
    def test_equal_states(self):
        rho = state(CounterRNG(6), 2)
        rows = exponent_convergence(TestingInstance(rho, rho), 4)
        assert all(r.exponent == pytest.approx(0.0, abs=1e-12) and r.passed for r in rows)

    def test_classical_rows(self):
        p, q = [0.6, 0.4], [0.5, 0.5]
        rows = exponent_convergence(TestingInstance(functional(np.diag(p)), functional(np.diag(q))), 5)
        for r in rows:
            assert r.bayes_error == pytest.approx(classical_bayes(p, q, r.n), rel=1e-11)
            assert r.passed

    def test_generic_qubit(self):
        rng = CounterRNG(7)
        for prior in (0.5, 0.2):
            rho, sigma = state(rng, 2), state(rng, 2)
            rows = exponent_convergence(TestingInstance(rho, sigma, prior), 6)
            assert all(r.passed for r in rows)
            assert all(r.rate is not None for r in rows)

    def test_row_dict(self):
        rho = functional(np.diag([1.0, 0.0]))
        sigma = functional(np.diag([0.0, 1.0]))
        row = exponent_convergence(TestingInstance(rho, sigma), 1)[0].as_dict()
        assert row["rate"] == "infinite" and row["exponent"] == "infinite" and row["pass"]


def test_q_is_log_convex():
    rng = CounterRNG(8)
    rho, sigma = state(rng, 3), state(rng, 3)
    s = np.linspace(0.05, 0.95, 19)
    logq = np.log([chernoff_q(rho, sigma, x) for x in s])
    assert np.all(np.diff(logq, 2) >= -1e-12)
