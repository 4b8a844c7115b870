"""Verifiers for the overlap inequalities and their equality conditions.

All verifiers work directly with pseudo-powers, so none of them needs
faithful inputs.  Each returns a :class:`VerificationReport` whose ``gap`` is
``rhs - lhs`` for a claim of the form ``lhs <= rhs``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import (
    Algebra,
    HermitianFunctional,
    NormalFunctional,
    _same_algebra,
    jordan,
    leq,
    orthogonal,
    order_scale,
)
from .errors import InputError, PreconditionError
from .numerics import DEFAULT_TOL, TolerancePolicy, op_norm, trace_norm
from .rng import CounterRNG
from .sampling import haar_unitary
from .standard_form import overlap_F

__all__ = [
    "S_GRID",
    "VerificationReport",
    "EqualityCertificate",
    "verify_main",
    "verify_corollary",
    "verify_diff_monotonicity",
    "verify_lemma_ec",
    "certify_equality",
    "construct_equality_instance",
    "verify_continuity",
    "chain_gaps",
    "regularized_limit",
]

S_GRID = tuple(round(0.05 * k, 2) for k in range(1, 20))


@dataclass
class VerificationReport:
    name: str
    lhs: float
    rhs: float
    gap: float
    scale: float
    passed: bool
    details: dict = field(default_factory=dict)

    @classmethod
    def build(cls, name, lhs, rhs, scale, tol: TolerancePolicy, **details) -> "VerificationReport":
        gap = float(rhs) - float(lhs)
        return cls(name, float(lhs), float(rhs), gap, float(scale), gap >= -tol.ineq_slack * scale, details)

    @property
    def rel_gap(self) -> float:
        return self.gap / self.scale


@dataclass
class EqualityCertificate:
    """Structural test for equality in the main inequality.

    ``plus_orth_phi`` is ``max_k ||s((eta - phi)_+) D_phi||`` and
    ``minus_orth_eta`` is ``max_k ||s((eta - phi)_-) D_eta||``.  ``psi`` is the
    common part ``eta - (eta - phi)_+`` when it is positive, else ``None``.
    """

    plus_orth_phi: float
    minus_orth_eta: float
    psi: NormalFunctional | None
    verdict: bool
    scale: float


def _mass_positive_part(eta: NormalFunctional, phi: NormalFunctional) -> float:
    return jordan(eta - phi).plus.mass


def _abs_mass(d: HermitianFunctional) -> float:
    return float(sum(trace_norm(sd) for sd in d.spectra))


def verify_main(eta: NormalFunctional, phi: NormalFunctional, s: float, tol: TolerancePolicy = DEFAULT_TOL) -> VerificationReport:
    """``eta(1) - (eta - phi)_+(1) <= ||Delta_{eta,phi}^{s/2} xi_phi||^2``."""
    _same_algebra(eta, phi)
    lhs = eta.mass - _mass_positive_part(eta, phi)
    rhs = overlap_F(eta, phi, s)
    return VerificationReport.build("main", lhs, rhs, order_scale(eta, phi), tol, s=float(s))


def verify_corollary(eta: NormalFunctional, phi: NormalFunctional, s: float, tol: TolerancePolicy = DEFAULT_TOL) -> VerificationReport:
    """``phi(1) + eta(1) - |phi - eta|(1) <= 2 F_s(eta, phi)``.

    ``details['swap_residual']`` records ``|F_{1-s}(phi, eta) - F_s(eta, phi)|``.
    """
    _same_algebra(eta, phi)
    scale = order_scale(eta, phi)
    f = overlap_F(eta, phi, s)
    swapped = overlap_F(phi, eta, 1.0 - s)
    lhs = phi.mass + eta.mass - _abs_mass(phi - eta)
    residual = abs(swapped - f)
    return VerificationReport.build(
        "corollary", lhs, 2.0 * f, scale, tol,
        s=float(s), swap_residual=residual, swap_ok=residual <= 1e-10 * scale,
    )


def verify_diff_monotonicity(phi1, phi2, eta, psi, s: float, tol: TolerancePolicy = DEFAULT_TOL) -> VerificationReport:
    """``F(phi2, eta) - F(phi1, eta) <= F(phi2, psi) - F(phi1, psi)`` for ``phi1 <= phi2``, ``eta <= psi``.

    Raises:
        PreconditionError: when either order hypothesis fails.
    """
    _same_algebra(phi1, phi2, eta, psi)
    if not leq(phi1, phi2, tol):
        raise PreconditionError("phi1 <= phi2 does not hold")
    if not leq(eta, psi, tol):
        raise PreconditionError("eta <= psi does not hold")
    lhs = overlap_F(phi2, eta, s) - overlap_F(phi1, eta, s)
    rhs = overlap_F(phi2, psi, s) - overlap_F(phi1, psi, s)
    return VerificationReport.build("diff_monotonicity", lhs, rhs, order_scale(phi1, phi2, eta, psi), tol, s=float(s))


def verify_lemma_ec(eta: NormalFunctional, phi: NormalFunctional, s: float, tol: TolerancePolicy = DEFAULT_TOL):
    """Check ``phi(1) <= F_s(eta, phi)`` for ``phi <= eta`` and the equality criterion.

    Returns ``(report, consistent)`` where ``consistent`` says whether
    "equality holds" and "``eta - phi`` is orthogonal to ``phi``" agree.
    """
    _same_algebra(eta, phi)
    if not leq(phi, eta, tol):
        raise PreconditionError("phi <= eta does not hold")
    scale = order_scale(eta, phi)
    rhs = overlap_F(eta, phi, s)
    report = VerificationReport.build("lemma_ec", phi.mass, rhs, scale, tol, s=float(s))
    equal = abs(report.gap) <= tol.ineq_slack * scale
    ortho = orthogonal((eta - phi).to_normal(eta.scale), phi, tol)
    report.details.update(equality=equal, orthogonal=ortho)
    return report, equal == ortho


def certify_equality(eta: NormalFunctional, phi: NormalFunctional, tol: TolerancePolicy = DEFAULT_TOL) -> EqualityCertificate:
    _same_algebra(eta, phi)
    parts = jordan(eta - phi)
    scale = order_scale(eta, phi)
    # supports of the parts are cut relative to the operands: a vanishing part
    # is pure roundoff and must not count as support
    ref = max(eta.scale, phi.scale)
    plus_supp = [sd.power(0.0, tol, ref) for sd in parts.plus.spectra]
    minus_supp = [sd.power(0.0, tol, ref) for sd in parts.minus.spectra]
    plus_res = max(op_norm(p @ d) for p, d in zip(plus_supp, phi.densities))
    minus_res = max(op_norm(n @ d) for n, d in zip(minus_supp, eta.densities))
    verdict = plus_res <= tol.ineq_slack * scale and minus_res <= tol.ineq_slack * scale
    common = eta - parts.plus
    try:
        psi = common.to_normal(max(eta.scale, phi.scale))
    except InputError:
        psi = None
    return EqualityCertificate(plus_res, minus_res, psi, verdict, scale)


def construct_equality_instance(algebra: Algebra, ranks: Sequence[int], seed: int, tol: TolerancePolicy = DEFAULT_TOL):
    """Build ``(eta, phi)`` with ``eta = P + psi`` and ``phi = N + psi`` on mutually orthogonal supports.

    ``ranks = (rank P, rank N, rank psi)``; the ranks are distributed over the
    blocks by a seeded shuffle of the available basis slots.
    """
    r_plus, r_minus, r_common = (int(r) for r in ranks)
    if min(r_plus, r_minus, r_common) < 0:
        raise InputError(f"ranks must be non-negative, got {tuple(ranks)}")
    if r_plus + r_minus + r_common > algebra.hilbert_dim:
        raise InputError(f"ranks {tuple(ranks)} exceed the dimension {algebra.hilbert_dim}")
    rng = CounterRNG(seed, stream=0xE0)
    unitaries = [haar_unitary(rng, n) for n in algebra.blocks]
    slots = [(k, j) for k, n in enumerate(algebra.blocks) for j in range(n)]
    order = np.argsort(rng.uniform(len(slots)), kind="stable")
    labels = ["plus"] * r_plus + ["minus"] * r_minus + ["common"] * r_common
    parts = {name: algebra.zeros() for name in ("plus", "minus", "common")}
    for label, idx in zip(labels, order):
        k, j = slots[idx]
        v = unitaries[k][:, j : j + 1]
        parts[label][k] = parts[label][k] + rng.uniform(low=0.2, high=1.0) * (v @ v.conj().T)
    plus, minus, common = (NormalFunctional(algebra, tuple(parts[n]), tol) for n in ("plus", "minus", "common"))
    return plus + common, minus + common


def verify_continuity(phi, chi, eta, s: float, n_max: int = 64, tol: TolerancePolicy = DEFAULT_TOL, threshold: float = 1e-5) -> VerificationReport:
    """Track ``d_n = |F(phi + chi/n, eta) - F(phi, eta)|`` for ``n = 1..n_max``.

    Passes when ``d_{n_max} <= threshold * scale`` and the sequence is
    non-increasing over its second half.  The report's ``lhs`` is
    ``d_{n_max}`` and ``rhs`` the threshold; ``details['d']`` holds the series.
    """
    _same_algebra(phi, chi, eta)
    if n_max < 1:
        raise InputError("n_max must be at least 1")
    base = overlap_F(phi, eta, s)
    d = np.array([abs(overlap_F(phi + chi / n, eta, s) - base) for n in range(1, n_max + 1)])
    scale = order_scale(phi, chi, eta)
    tail = d[(n_max - 1) // 2 :]
    decreasing = bool(np.all(np.diff(tail) <= 1e-14 * scale))
    report = VerificationReport.build("continuity", d[-1], threshold * scale, scale, tol, s=float(s), d=d.tolist(), eventually_decreasing=decreasing)
    report.passed = report.passed and decreasing
    return report


def chain_gaps(eta: NormalFunctional, phi: NormalFunctional, s: float) -> dict:
    """The three intermediate inequalities of the faithful-case argument.

    With ``mu = phi + (eta - phi)_+`` these are

    * ``first  = F_s(mu, phi) - phi(1)``                          (monotonicity)
    * ``second = [mu(1) - F_s(eta, mu)] - [F_s(mu, phi) - F_s(eta, phi)]``  (difference monotonicity)
    * ``third  = F_{1-s}(mu, eta) - eta(1)``                      (monotonicity)

    each of which is non-negative; ``symmetry`` is the residual of
    ``F_s(eta, mu) = F_{1-s}(mu, eta)``.
    """
    mu = phi + jordan(eta - phi).plus
    f_mu_phi = overlap_F(mu, phi, s)
    f_eta_phi = overlap_F(eta, phi, s)
    f_eta_mu = overlap_F(eta, mu, s)
    f_mu_eta = overlap_F(mu, eta, 1.0 - s)
    return {
        "first": f_mu_phi - phi.mass,
        "second": (mu.mass - f_eta_mu) - (f_mu_phi - f_eta_phi),
        "third": f_mu_eta - eta.mass,
        "symmetry": abs(f_eta_mu - f_mu_eta),
        "total": f_eta_phi - (eta.mass + phi.mass - mu.mass),
    }


def regularized_limit(eta: NormalFunctional, phi: NormalFunctional, s: float, steps: Sequence[float] = (1e-2, 1e-4, 1e-6, 1e-8, 1e-10)) -> list[tuple[float, float, float]]:
    """Faithful regularisation ``F_s(eta + d*phi, phi + e*eta)`` along ``e = d = step``.

    Returns ``(step, regularised value, |value - F_s(eta, phi)|)`` rows; the
    last column must tend to zero.
    """
    target = overlap_F(eta, phi, s)
    rows = []
    for t in steps:
        value = overlap_F(eta + t * phi, phi + t * eta, s)
        rows.append((float(t), value, abs(value - target)))
    return rows
