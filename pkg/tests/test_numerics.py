import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from modineq.errors import InputError, NotPSDError
from modineq.numerics import (
    DEFAULT_TOL,
    TolerancePolicy,
    abs_val,
    eigh,
    is_projection,
    jordan_parts,
    op_norm,
    projection_join,
    pseudo_power,
    support_proj,
    trace_norm,
)
from modineq.oracle import frac_power_integral
from modineq.rng import CounterRNG
from modineq.sampling import random_density


def random_hermitian(seed, n):
    g = CounterRNG(seed).complex_normal((n, n))
    return 0.5 * (g + g.conj().T)


class TestEigh:
    def test_identity(self):
        sd = eigh(np.eye(3))
        np.testing.assert_allclose(sd.eigenvalues, [1, 1, 1])
        u = sd.eigenvectors
        np.testing.assert_allclose(u.conj().T @ u, np.eye(3), atol=1e-14)

    def test_diagonal_sorted(self):
        np.testing.assert_allclose(eigh(np.diag([2.0, -1.0])).eigenvalues, [-1, 2])

    def test_swap_matrix(self):
        # lambda^2 = 1 from the characteristic polynomial
        np.testing.assert_allclose(eigh([[0, 1], [1, 0]]).eigenvalues, [-1, 1], atol=1e-15)

    def test_reconstruct(self):
        h = random_hermitian(3, 6)
        np.testing.assert_allclose(eigh(h).reconstruct(), h, atol=1e-13)

    def test_rejects_non_finite(self):
        with pytest.raises(InputError):
            eigh([[np.nan, 0], [0, 1]])

    def test_rejects_non_square(self):
        with pytest.raises(InputError):
            eigh(np.ones((2, 3)))


class TestPseudoPower:
    @pytest.mark.parametrize("z", [0.0, 0.3, 0.5, 1.0, 0.5 + 0.7j])
    def test_identity(self, z):
        np.testing.assert_allclose(pseudo_power(np.eye(3), z), np.eye(3), atol=1e-14)

    def test_kills_kernel(self):
        np.testing.assert_allclose(pseudo_power(np.diag([4.0, 0.0]), 0.5), np.diag([2.0, 0.0]), atol=1e-15)

    def test_zero_power_is_support(self):
        np.testing.assert_allclose(pseudo_power(np.diag([4.0, 0.0]), 0.0), np.diag([1.0, 0.0]))

    def test_matches_integral_oracle(self):
        h = random_density(CounterRNG(7), 3)
        ref = frac_power_integral(h, 0.3)
        got = pseudo_power(h, 0.3)
        assert op_norm(got - ref) <= 1e-6 * op_norm(ref)

    def test_matches_scipy_on_faithful(self):
        h = random_density(CounterRNG(8), 5)
        np.testing.assert_allclose(pseudo_power(h, 0.7), scipy.linalg.fractional_matrix_power(h, 0.7), atol=1e-12)

    def test_semigroup(self):
        h = random_density(CounterRNG(9), 4, rank=2)
        a, b = 0.2 + 0.3j, 0.45 - 0.1j
        np.testing.assert_allclose(pseudo_power(h, a) @ pseudo_power(h, b), pseudo_power(h, a + b), atol=1e-12)

    def test_imaginary_power_is_partial_isometry(self):
        h = random_density(CounterRNG(10), 4, rank=3)
        u = pseudo_power(h, 0.8j)
        np.testing.assert_allclose(u @ u.conj().T, support_proj(h), atol=1e-12)

    def test_negative_eigenvalue(self):
        with pytest.raises(NotPSDError):
            pseudo_power(np.diag([1.0, -0.1]), 0.5)

    def test_roundoff_negative_is_clipped(self):
        out = pseudo_power(np.diag([1.0, -1e-14]), 0.5)
        np.testing.assert_allclose(out, np.diag([1.0, 0.0]))


class TestJordanParts:
    def test_diagonal(self):
        p, n = jordan_parts(np.diag([2.0, -1.0]))
        np.testing.assert_allclose(p, np.diag([2.0, 0.0]))
        np.testing.assert_allclose(n, np.diag([0.0, 1.0]))

    def test_zero(self):
        p, n = jordan_parts(np.zeros((3, 3)))
        assert not p.any() and not n.any()

    def test_two_by_two(self):
        # eigenvalues +-sqrt(2) by hand
        p, n = jordan_parts(np.array([[1.0, 1.0], [1.0, -1.0]]))
        np.testing.assert_allclose(np.linalg.eigvalsh(p), [0, np.sqrt(2)], atol=1e-14)
        np.testing.assert_allclose(np.linalg.eigvalsh(n), [0, np.sqrt(2)], atol=1e-14)
        np.testing.assert_allclose(p @ n, 0, atol=1e-14)

    def test_invariants_on_seeded_batch(self):
        for seed in range(500):
            n = 1 + seed % 16
            h = random_hermitian(seed, n)
            p, m = jordan_parts(h)
            scale = max(op_norm(h), 1.0)
            assert op_norm(p - m - h) <= 1e-12 * scale
            assert op_norm(p @ m) <= 1e-12 * scale
            assert np.linalg.eigvalsh(p).min() >= -1e-12 * scale
            assert np.linalg.eigvalsh(m).min() >= -1e-12 * scale
            assert abs(np.trace(p + m).real - trace_norm(h)) <= 1e-11 * scale * n


class TestSupport:
    def test_diagonal(self):
        np.testing.assert_allclose(support_proj(np.diag([3.0, 0.0])), np.diag([1.0, 0.0]))

    def test_identity(self):
        np.testing.assert_allclose(support_proj(np.eye(4)), np.eye(4), atol=1e-14)

    def test_rank_one(self):
        v = np.array([[1.0], [1.0]]) / np.sqrt(2)
        proj = v @ v.T
        np.testing.assert_allclose(support_proj(5 * proj), proj, atol=1e-14)

    def test_scale_relative_cut(self):
        h = np.diag([1.0, 1e-12])
        np.testing.assert_allclose(support_proj(h), np.diag([1.0, 0.0]))
        fine = TolerancePolicy(support_cut=1e-14)
        np.testing.assert_allclose(support_proj(h, fine), np.eye(2))


class TestProjectionJoin:
    def test_same(self):
        p = np.diag([1.0, 0.0, 1.0])
        np.testing.assert_allclose(projection_join(p, p), p, atol=1e-14)

    def test_orthogonal(self):
        np.testing.assert_allclose(projection_join(np.diag([1.0, 0.0]), np.diag([0.0, 1.0])), np.eye(2), atol=1e-14)

    def test_non_orthogonal_rank_one(self):
        # the ranges of e1 and (e1+e2)/sqrt(2) span C^2
        v = np.array([[1.0], [1.0]]) / np.sqrt(2)
        np.testing.assert_allclose(projection_join(np.diag([1.0, 0.0]), v @ v.T), np.eye(2), atol=1e-13)

    def test_rejects_non_projection(self):
        with pytest.raises(InputError):
            projection_join(np.diag([2.0, 0.0]), np.eye(2))

    def test_result_is_projection(self):
        rng = CounterRNG(11)
        p = support_proj(random_density(rng, 5, rank=2))
        q = support_proj(random_density(rng, 5, rank=2))
        j = projection_join(p, q)
        assert is_projection(j)
        assert round(np.trace(j).real) == 4


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=2**32), st.integers(min_value=1, max_value=8))
def test_abs_val_squares_to_square(seed, n):
    h = random_hermitian(seed, n)
    a = abs_val(h)
    np.testing.assert_allclose(a @ a, h @ h, atol=1e-11 * max(1.0, op_norm(h)) ** 2)
    assert abs(np.trace(a).real - trace_norm(h)) <= 1e-11 * max(1.0, op_norm(h)) * n


def test_tolerance_policy_validation():
    with pytest.raises(InputError):
        TolerancePolicy(support_cut=-1.0)
    assert DEFAULT_TOL.replace(ineq_slack=None) == DEFAULT_TOL
