import warnings

import numpy as np
import pytest

from modineq.algebra import Algebra, NormalFunctional
from modineq.errors import ConditioningWarning, ConvergenceError, InputError, NotPSDError
from modineq.numerics import op_norm, pseudo_power
from modineq.oracle import (
    QuadratureConfig,
    frac_power_integral,
    integrand_bounds_check,
    overlap_integral,
    resolvent_overlap,
)
from modineq.rng import CounterRNG
from modineq.sampling import conditioned_psd, make_instance, random_density, random_functional
from modineq.standard_form import overlap_F

from conftest import functional


class TestFracPower:
    def test_identity(self):
        np.testing.assert_allclose(frac_power_integral(np.eye(3), 0.4), np.eye(3), atol=1e-8)

    def test_scalar(self):
        assert frac_power_integral(np.array([[4.0]]), 0.5)[0, 0].real == pytest.approx(2.0, abs=1e-8)

    def test_dim8_matches_spectral(self):
        h = random_density(CounterRNG(1), 8)
        ref = pseudo_power(h, 0.3)
        assert op_norm(frac_power_integral(h, 0.3) - ref) <= 1e-8 * op_norm(ref)

    def test_rank_deficient_kernel(self):
        h = random_density(CounterRNG(2), 5, rank=2)
        out = frac_power_integral(h, 0.6)
        assert op_norm(out - pseudo_power(h, 0.6)) <= 1e-8 * op_norm(out)

    def test_zero(self):
        assert not frac_power_integral(np.zeros((2, 2)), 0.5).any()

    def test_conditioned_batch(self):
        rng = CounterRNG(3)
        worst = 0.0
        for i in range(40):
            h = conditioned_psd(rng, 1 + i % 12, 1e6)
            for s in (0.1, 0.5, 0.9):
                ref = pseudo_power(h, s)
                worst = max(worst, op_norm(frac_power_integral(h, s) - ref) / op_norm(ref))
        assert worst <= 1e-6

    def test_error_history(self):
        cfg = QuadratureConfig(target_rel_error=1e-12, panel_width=40.0)
        res = frac_power_integral(random_density(CounterRNG(4), 4), 0.5, cfg, full_output=True)
        assert res.error <= 1e-12
        assert res.history == sorted(res.history, reverse=True)
        assert len(res.history) >= 2

    def test_convergence_failure(self):
        cfg = QuadratureConfig(target_rel_error=1e-15, max_panels=2, panel_width=1000.0)
        with pytest.raises(ConvergenceError):
            frac_power_integral(random_density(CounterRNG(5), 3), 0.5, cfg)

    @pytest.mark.parametrize("s", [0.0, 0.01, 0.99, 1.0])
    def test_s_range(self, s):
        with pytest.raises(InputError):
            frac_power_integral(np.eye(2), s)

    def test_not_psd(self):
        with pytest.raises(NotPSDError):
            frac_power_integral(np.diag([1.0, -0.5]), 0.5)

    def test_conditioning_warning(self):
        with pytest.warns(ConditioningWarning):
            res = frac_power_integral(np.diag([1.0, 1e-9]), 0.5, full_output=True)
        assert res.warnings

    def test_no_warning_when_well_conditioned(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            frac_power_integral(np.diag([1.0, 0.5]), 0.5)


class TestOverlapIntegral:
    def test_equal(self, random_pair):
        f = random_pair[0]
        assert overlap_integral(f, f, 0.3) == pytest.approx(f.mass, rel=1e-6)

    def test_orthogonal(self):
        assert overlap_integral(functional(np.diag([1.0, 0.0])), functional(np.diag([0.0, 1.0])), 0.5) == 0

    def test_qubit(self):
        got = overlap_integral(functional(np.diag([0.6, 0.4])), functional(np.diag([0.5, 0.5])), 0.5)
        assert got == pytest.approx(np.sqrt(0.3) + np.sqrt(0.2), rel=1e-6)

    def test_matches_trace_path(self):
        for i, kind in enumerate(["random", "rank-deficient", "random"]):
            inst = make_instance(9, i, (2, 3), kind)
            for s in (0.1, 0.5, 0.9):
                assert overlap_integral(inst["eta"], inst["phi"], s) == pytest.approx(
                    overlap_F(inst["eta"], inst["phi"], s), rel=1e-6)


class TestResolvent:
    def test_commuting_closed_form(self):
        # <Delta (Delta + lam)^-1 xi, xi> = sum_i b_i * (a_i/b_i) / (a_i/b_i + lam)
        a, b = np.array([0.6, 0.4]), np.array([0.3, 0.7])
        lam = np.array([0.1, 1.0, 10.0])
        got = resolvent_overlap(functional(np.diag(a)), functional(np.diag(b)), lam)
        expected = [(b * (a / b) / (a / b + x)).sum() for x in lam]
        np.testing.assert_allclose(got, expected, rtol=1e-12)


class TestBounds:
    def test_identical_sequence(self, random_pair):
        eta, phi = random_pair
        rep = integrand_bounds_check(eta, phi, phi, 0.5)
        assert rep.passed and np.all(rep.values == 0)

    def test_large_lambda_tail(self, random_pair):
        eta, phi = random_pair
        phi_n = phi + random_functional(CounterRNG(6), phi.algebra) / 4
        rep = integrand_bounds_check(eta, phi_n, phi, 0.5, lam_grid=np.logspace(4, 8, 9))
        assert rep.passed
        assert np.all(np.abs(rep.values) <= rep.bound_large)
        assert np.all(rep.bound_large < rep.bound_small)

    def test_seeded_sequence(self):
        rng = CounterRNG(7)
        a = Algebra.of(2, 3)
        eta, phi, chi = (random_functional(rng, a) for _ in range(3))
        for n in (1, 2, 8, 64):
            assert integrand_bounds_check(eta, phi + chi / n, phi, 0.3).passed
