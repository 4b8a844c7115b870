"""Symmetric binary hypothesis testing between two density states.

``Q(s) = Tr(rho^s sigma^(1-s))`` is the overlap of :func:`overlap_F`; for
``A = p rho^{(x)n}`` and ``B = (1-p) sigma^{(x)n}`` the optimal Bayes error
``P_e = (A(1) + B(1) - |A - B|(1)) / 2`` is bounded by
``p^s (1-p)^(1-s) Q(s)^n`` for every ``s``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .algebra import Algebra, NormalFunctional, _same_algebra
from .errors import InputError
from .numerics import trace_norm
from .standard_form import overlap_F

__all__ = [
    "TENSOR_DIM_CAP",
    "TestingInstance",
    "ChernoffResult",
    "ConvergenceRow",
    "chernoff_q",
    "minimize_q",
    "golden_section",
    "tensor_power",
    "split_classical",
    "bayes_error",
    "exponent_convergence",
]

TENSOR_DIM_CAP = 1024
Q_FLOOR = 1e-300
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class TestingInstance:
    rho: NormalFunctional
    sigma: NormalFunctional
    prior_p: float = 0.5

    __test__ = False  # not a pytest class

    def __post_init__(self):
        _same_algebra(self.rho, self.sigma)
        for name in ("rho", "sigma"):
            mass = getattr(self, name).mass
            if abs(mass - 1.0) > 1e-10:
                raise InputError(f"{name} must have unit mass, got {mass!r}")
        if not (0.0 < self.prior_p < 1.0):
            raise InputError(f"prior must lie in (0, 1), got {self.prior_p!r}")


@dataclass(frozen=True)
class ChernoffResult:
    """Minimiser of ``Q`` on ``[0, 1]``; ``exponent`` is ``None`` when ``Q`` vanishes."""

    s_star: float
    q_star: float
    exponent: float | None

    @property
    def infinite(self) -> bool:
        return self.exponent is None

    def to_dict(self) -> dict:
        return {
            "s_star": self.s_star,
            "q_star": self.q_star,
            "exponent": "infinite" if self.infinite else self.exponent,
        }


def chernoff_q(rho: NormalFunctional, sigma: NormalFunctional, s: float) -> float:
    return overlap_F(rho, sigma, s)


def golden_section(f, lo: float, hi: float, width: float = 1e-8, max_iter: int = 200):
    """Minimise a unimodal ``f`` on ``[lo, hi]``; returns ``(x, f(x))``."""
    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if hi - lo <= width:
            break
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - GOLDEN * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + GOLDEN * (hi - lo)
            f2 = f(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2)


def minimize_q(rho: NormalFunctional, sigma: NormalFunctional, grid_points: int = 101, width: float = 1e-8) -> ChernoffResult:
    """Coarse grid on ``[0, 1]`` followed by golden-section refinement.

    ``Q`` is log-convex in ``s``, so the bracket around the best grid point
    contains the global minimiser.
    """
    _same_algebra(rho, sigma)
    grid = np.linspace(0.0, 1.0, grid_points)
    values = np.array([chernoff_q(rho, sigma, s) for s in grid])
    i = int(np.argmin(values))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid_points - 1)]
    s_star, q_star = golden_section(lambda s: chernoff_q(rho, sigma, s), lo, hi, width)
    if values[i] < q_star:
        s_star, q_star = float(grid[i]), float(values[i])
    q_star = max(float(q_star), 0.0)
    exponent = None if q_star < Q_FLOOR else -math.log(q_star)
    return ChernoffResult(float(s_star), q_star, exponent)


def split_classical(f: NormalFunctional) -> NormalFunctional:
    """Rewrite a functional with diagonal densities on ``1 x 1`` blocks."""
    diag = np.concatenate([np.diagonal(d).real for d in f.densities])
    return NormalFunctional(Algebra((1,) * diag.size), tuple(np.array([[x]]) for x in diag), f.tol)


def _is_diagonal(f: NormalFunctional) -> bool:
    return all(np.count_nonzero(d - np.diag(np.diagonal(d))) == 0 for d in f.densities)


def tensor_power(f: NormalFunctional, n: int, cap: int = TENSOR_DIM_CAP) -> NormalFunctional:
    """``f^{(x)n}`` on the algebra whose blocks are all n-fold products of blocks."""
    if n < 1:
        raise InputError("number of copies must be at least 1")
    if f.algebra.hilbert_dim ** n > cap:
        raise InputError(f"tensor power dimension {f.algebra.hilbert_dim}^{n} exceeds the cap {cap}")
    blocks, sizes = [], []
    for combo in itertools.product(range(len(f.densities)), repeat=n):
        d = np.ones((1, 1), dtype=complex)
        for k in combo:
            d = np.kron(d, f.densities[k])
        blocks.append(d)
        sizes.append(d.shape[0])
    return NormalFunctional(Algebra(tuple(sizes)), tuple(blocks), f.tol)


def _copies(instance: TestingInstance, n: int, cap: int):
    rho, sigma = instance.rho, instance.sigma
    if _is_diagonal(rho) and _is_diagonal(sigma):
        rho, sigma = split_classical(rho), split_classical(sigma)
    return tensor_power(rho, n, cap), tensor_power(sigma, n, cap)


def bayes_error(instance: TestingInstance, n: int, cap: int = TENSOR_DIM_CAP) -> float:
    """Optimal error probability for discriminating ``n`` copies with prior ``p``."""
    rho_n, sigma_n = _copies(instance, n, cap)
    p = instance.prior_p
    diff = p * rho_n - (1.0 - p) * sigma_n
    dist = sum(trace_norm(sd) for sd in diff.spectra)
    return max(0.0, 0.5 * (p * rho_n.mass + (1.0 - p) * sigma_n.mass - dist))


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    bayes_error: float
    rate: float | None  # -(1/n) log P_e; None when P_e == 0
    exponent: float | None
    bound: float  # p^s (1-p)^(1-s) Q(s)^n at the minimiser
    passed: bool

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "bayes_error": self.bayes_error,
            "rate": "infinite" if self.rate is None else self.rate,
            "exponent": "infinite" if self.exponent is None else self.exponent,
            "bound": self.bound,
            "pass": self.passed,
        }


def exponent_convergence(instance: TestingInstance, n_max: int, slack: float = 1e-12,
                         result: ChernoffResult | None = None) -> list[ConvergenceRow]:
    """Per-``n`` Bayes error against the Chernoff upper bound at the minimiser.

    A row passes when ``P_e(n) <= p^s (1-p)^(1-s) Q(s)^n + slack``, i.e.
    ``-(1/n) log P_e(n) >= exponent - (1/n) log(p^s (1-p)^(1-s))`` up to slack.
    """
    if result is None:
        result = minimize_q(instance.rho, instance.sigma)
    p, s = instance.prior_p, result.s_star
    prior = p**s * (1.0 - p) ** (1.0 - s)
    rows = []
    for n in range(1, n_max + 1):
        pe = bayes_error(instance, n)
        bound = prior * result.q_star**n
        rate = None if pe <= 0.0 else -math.log(pe) / n
        rows.append(ConvergenceRow(n, pe, rate, result.exponent, bound, pe <= bound + slack))
    return rows
