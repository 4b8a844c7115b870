"""Fractional powers and overlaps from the resolvent integral of ``t ** s``.

For ``0 < s < 1`` and ``t >= 0``::

    t ** s = sin(s pi) / pi * integral_0^inf  lam ** (s - 1) * t / (t + lam)  d lam

Lifted to matrices the integrand needs only linear solves, so this path never
evaluates a function of eigenvalues and serves as an independent check on the
spectral path in :mod:`modineq.numerics`.  Eigen-solvers are used here only
to pick the integration window and an orthonormal basis of the support.

Quadrature runs in ``u = log(lam)`` over
``[log(lam_min) - margin, log(lam_max) + margin]`` with composite
Gauss-Legendre panels, doubling the panel count until successive estimates
agree to ``target_rel_error``.  Outside the window the integrand is, to
relative accuracy ``exp(-margin)``, a pure exponential in ``u`` (``e^{s u}`` on
the left, ``e^{(s-1) u}`` on the right), and those tails are added in closed
form from the integrand's value at the window edges.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_sylvester

from .algebra import NormalFunctional, _same_algebra
from .errors import ConditioningWarning, ConvergenceError, InputError
from .numerics import DEFAULT_TOL, TolerancePolicy, eigh

__all__ = [
    "QuadratureConfig",
    "QuadratureResult",
    "frac_power_integral",
    "overlap_integral",
    "resolvent_overlap",
    "integrand_bounds_check",
    "BoundsReport",
]

S_MIN, S_MAX = 0.02, 0.98
MAX_CONDITION = 1e8


@dataclass(frozen=True)
class QuadratureConfig:
    target_rel_error: float = 1e-8
    max_panels: int = 4096
    order: int = 8
    margin: float = 40.0
    panel_width: float = 4.0
    transform: str = field(default="log", init=False)

    def __post_init__(self):
        if not self.target_rel_error > 0:
            raise InputError("target_rel_error must be positive")
        if self.max_panels < 1 or self.order < 2:
            raise InputError("max_panels must be >= 1 and order >= 2")


@dataclass
class QuadratureResult:
    value: np.ndarray
    error: float
    panels: int
    history: list[float]
    warnings: list[str] = field(default_factory=list)


def _check_s(s: float) -> float:
    s = float(s)
    if not (S_MIN <= s <= S_MAX):
        raise InputError(f"the integral oracle needs s in [{S_MIN}, {S_MAX}], got {s}")
    return s


def _panel_rule(lo: float, hi: float, panels: int, order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _integrate(func, lo: float, hi: float, s: float, cfg: QuadratureConfig, chunk: int = 1024) -> QuadratureResult:
    """Integrate ``func(u)`` over the real line; ``func`` maps a node vector to stacked values."""
    tails = func(np.array([lo, hi]))
    tail = tails[0] / s + tails[1] / (1.0 - s)
    panels = max(1, int(np.ceil((hi - lo) / cfg.panel_width)))
    previous = None
    history: list[float] = []
    while True:
        nodes, weights = _panel_rule(lo, hi, panels, cfg.order)
        total = tail.copy()
        # ascending node order keeps the summation deterministic
        for start in range(0, nodes.size, chunk):
            vals = func(nodes[start : start + chunk])
            total = total + np.tensordot(weights[start : start + chunk], vals, axes=1)
        if previous is not None:
            err = float(np.linalg.norm(total - previous)) / max(float(np.linalg.norm(total)), 1e-300)
            history.append(err)
            if err <= cfg.target_rel_error:
                return QuadratureResult(total, err, panels, history)
        if 2 * panels > cfg.max_panels:
            raise ConvergenceError(
                f"quadrature did not reach {cfg.target_rel_error:.1e} within {cfg.max_panels} panels "
                f"(last estimate {history[-1] if history else float('nan'):.2e})"
            )
        previous = total
        panels *= 2


def _support(h, tol: TolerancePolicy, scale: float | None = None):
    sd = eigh(h)
    lam = sd.clipped(tol, scale)
    basis = sd.support_basis(tol, scale)
    lam = lam[sd.support_mask(tol, scale)]
    return basis, lam


def frac_power_integral(h, s: float, cfg: QuadratureConfig = QuadratureConfig(), tol: TolerancePolicy = DEFAULT_TOL,
                        full_output: bool = False):
    """``H ** s`` of a PSD matrix from the resolvent integral.

    The kernel of ``H`` (per the support cut) is projected out first, so the
    result vanishes there exactly like the pseudo-power.

    Raises:
        InputError: ``s`` outside ``[0.02, 0.98]``.
        NotPSDError: material negative eigenvalue.
        ConvergenceError: quadrature did not converge within ``max_panels``.
    """
    s = _check_s(s)
    h = np.asarray(h, dtype=complex)
    basis, lam = _support(h, tol)
    n = h.shape[0]
    if lam.size == 0:
        zero = np.zeros((n, n), dtype=complex)
        return QuadratureResult(zero, 0.0, 0, []) if full_output else zero
    hc = basis.conj().T @ h @ basis
    hc = 0.5 * (hc + hc.conj().T)
    r = hc.shape[0]
    eye = np.eye(r)
    notes = []
    cond = lam.max() / lam.min()
    if cond > MAX_CONDITION:
        msg = f"condition number on the support is {cond:.2e} > {MAX_CONDITION:.0e}"
        warnings.warn(msg, ConditioningWarning, stacklevel=2)
        notes.append(msg)

    def integrand(u):
        lam_u = np.exp(u)
        sol = np.linalg.solve(hc[None, :, :] + lam_u[:, None, None] * eye[None], np.broadcast_to(hc, (u.size, r, r)))
        return np.exp(s * u)[:, None, None] * sol

    res = _integrate(integrand, np.log(lam.min()) - cfg.margin, np.log(lam.max()) + cfg.margin, s, cfg)
    inner = res.value * (np.sin(s * np.pi) / np.pi)
    inner = 0.5 * (inner + inner.conj().T)
    out = basis @ inner @ basis.conj().T
    if full_output:
        res.value = out
        res.warnings = notes
        return res
    return out


class _ResolventPair:
    """``g(lam) = <Delta (Delta + lam)^{-1} xi_second, xi_second>`` for ``Delta = Delta_{first, second}``, one block.

    In support coordinates with ``A = D_first``, ``B = D_second`` and
    ``C = V_first^* D_second V_second`` this is ``Tr(K A W)`` where
    ``A W + lam W B = C`` and ``K = V_second^* V_first``.
    """

    def __init__(self, d_first, d_second, tol, scale_first, scale_second):
        v1, a_lam = _support(d_first, tol, scale_first)
        v2, b_lam = _support(d_second, tol, scale_second)
        self.empty = a_lam.size == 0 or b_lam.size == 0
        if self.empty:
            return
        self.a = v1.conj().T @ d_first @ v1
        self.b = v2.conj().T @ d_second @ v2
        self.c = v1.conj().T @ d_second @ v2
        self.k = v2.conj().T @ v1
        self.ka = self.k @ self.a
        self.ratio_min = a_lam.min() / b_lam.max()
        self.ratio_max = a_lam.max() / b_lam.min()

    def __call__(self, lam: float) -> float:
        if self.empty:
            return 0.0
        w = solve_sylvester(self.a, lam * self.b, self.c)
        return float(np.einsum("ij,ji->", self.ka, w).real)


def resolvent_overlap(first: NormalFunctional, second: NormalFunctional, lam, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """``<Delta(Delta + lam)^{-1} xi_second, xi_second>`` with ``Delta = Delta_{first,second}``, for each ``lam``."""
    _same_algebra(first, second)
    pairs = [
        _ResolventPair(d1, d2, tol, first.scale, second.scale)
        for d1, d2 in zip(first.densities, second.densities)
    ]
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    return np.array([sum(p(x) for p in pairs) for x in lam])


def overlap_integral(eta: NormalFunctional, phi: NormalFunctional, s: float, cfg: QuadratureConfig = QuadratureConfig(),
                     tol: TolerancePolicy = DEFAULT_TOL, full_output: bool = False):
    """``||Delta_{eta,phi}^{s/2} xi_phi||^2`` from the resolvent integral of ``t ** s``."""
    s = _check_s(s)
    _same_algebra(eta, phi)
    total = 0.0
    error = 0.0
    panels = 0
    for d_eta, d_phi in zip(eta.densities, phi.densities):
        pair = _ResolventPair(d_eta, d_phi, tol, eta.scale, phi.scale)
        if pair.empty:
            continue

        def integrand(u, pair=pair):
            return np.array([np.exp(s * x) * pair(np.exp(x)) for x in u])

        res = _integrate(integrand, np.log(pair.ratio_min) - cfg.margin, np.log(pair.ratio_max) + cfg.margin, s, cfg)
        total += float(res.value) * np.sin(s * np.pi) / np.pi
        error = max(error, res.error)
        panels = max(panels, res.panels)
    if full_output:
        return QuadratureResult(np.asarray(total), error, panels, [])
    return total


@dataclass
class BoundsReport:
    lam: np.ndarray
    values: np.ndarray
    bound_small: np.ndarray
    bound_large: np.ndarray
    passed: bool


def integrand_bounds_check(eta: NormalFunctional, phi_n: NormalFunctional, phi: NormalFunctional, s: float,
                           lam_grid=None, tol: TolerancePolicy = DEFAULT_TOL, slack: float = 1e-12) -> BoundsReport:
    """Check ``|f_n(lam)| <= lam^(s-1) eta(1)`` and ``|f_n(lam)| <= lam^(s-2) (phi(1) + phi_n(1))``.

    ``f_n(lam) = lam^(s-1) <[Delta_n(Delta_n + lam)^-1 - Delta(Delta + lam)^-1] xi_eta, xi_eta>``
    with ``Delta_n = Delta_{phi_n, eta}`` and ``Delta = Delta_{phi, eta}``.
    """
    if lam_grid is None:
        lam_grid = np.logspace(-3, 3, 61)
    lam = np.asarray(lam_grid, dtype=float)
    values = lam ** (s - 1.0) * (resolvent_overlap(phi_n, eta, lam, tol) - resolvent_overlap(phi, eta, lam, tol))
    bound_small = lam ** (s - 1.0) * eta.mass
    bound_large = lam ** (s - 2.0) * (phi.mass + phi_n.mass)
    passed = bool(np.all(np.abs(values) <= bound_small + slack) and np.all(np.abs(values) <= bound_large + slack))
    return BoundsReport(lam, values, bound_small, bound_large, passed)
