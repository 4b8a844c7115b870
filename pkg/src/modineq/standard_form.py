"""Standard form of a finite-dimensional algebra on Hilbert-Schmidt space.

The Hilbert space is ``H = HS(C^{n_1}) + ... + HS(C^{n_K})`` with inner product
``<a, b> = sum_k Tr(a_k^* b_k)``.  The algebra acts by left multiplication, the
modular conjugation is ``J(xi) = xi^*`` blockwise and the positive cone is the
set of blockwise PSD matrices.  For positive functionals ``phi, psi`` the
relative modular operator acts as ``xi -> D_phi xi D_psi^{-1}`` on supports,
so that

    Delta_{phi,psi}^z xi = D_phi^z  xi  D_psi^{-z}

with pseudo-powers on both sides.  Everything here is total (no domain
bookkeeping is needed in finite dimension).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from numbers import Number
from typing import Sequence

import numpy as np

from .algebra import Algebra, NormalFunctional, _same_algebra
from .errors import DomainError, InputError
from .numerics import op_norm

__all__ = [
    "StandardVector",
    "RelativeModularOperator",
    "ConnesCocycle",
    "xi_of",
    "apply_J",
    "left_action",
    "apply_delta_power",
    "overlap_F",
    "overlap_superoperator",
    "cocycle_at",
    "s_operator_apply",
    "s_operator_via_delta",
]


@dataclass(frozen=True, eq=False)
class StandardVector:
    """Vector of the standard Hilbert space, one ``n_k x n_k`` matrix per block."""

    algebra: Algebra
    blocks: tuple[np.ndarray, ...]

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.algebra.check_blocks(list(self.blocks))))

    @classmethod
    def zero(cls, algebra: Algebra) -> "StandardVector":
        return cls(algebra, tuple(algebra.zeros()))

    def inner(self, other: "StandardVector") -> complex:
        """``<self, other>``, antilinear in ``self``."""
        return complex(sum(np.vdot(a, b) for a, b in zip(self.blocks, other.blocks)))

    def norm_sq(self) -> float:
        return float(sum(np.vdot(a, a).real for a in self.blocks))

    def norm(self) -> float:
        return float(np.sqrt(self.norm_sq()))

    def __add__(self, other: "StandardVector") -> "StandardVector":
        return StandardVector(self.algebra, tuple(a + b for a, b in zip(self.blocks, other.blocks)))

    def __sub__(self, other: "StandardVector") -> "StandardVector":
        return StandardVector(self.algebra, tuple(a - b for a, b in zip(self.blocks, other.blocks)))

    def __mul__(self, c: Number) -> "StandardVector":
        return StandardVector(self.algebra, tuple(c * a for a in self.blocks))

    __rmul__ = __mul__

    def distance(self, other: "StandardVector") -> float:
        return (self - other).norm()


def xi_of(f: NormalFunctional) -> StandardVector:
    """The cone representative ``xi_f = D_f^{1/2}`` with ``f(x) = <xi_f, x xi_f>``."""
    return StandardVector(f.algebra, tuple(f.powers(0.5)))


def apply_J(xi: StandardVector) -> StandardVector:
    return StandardVector(xi.algebra, tuple(b.conj().T for b in xi.blocks))


def left_action(x: Sequence, xi: StandardVector) -> StandardVector:
    xs = xi.algebra.check_blocks(list(x))
    return StandardVector(xi.algebra, tuple(a @ b for a, b in zip(xs, xi.blocks)))


class RelativeModularOperator:
    """``Delta_{phi,psi}`` represented by its action on standard vectors.

    Spectral data of both densities is cached by the functionals themselves, so
    repeated applications with different exponents are cheap.
    """

    def __init__(self, phi: NormalFunctional, psi: NormalFunctional):
        _same_algebra(phi, psi)
        self.phi = phi
        self.psi = psi

    def __repr__(self):
        return f"RelativeModularOperator(blocks={self.phi.algebra.blocks})"

    def support_projection(self, xi: StandardVector) -> StandardVector:
        """``s(phi) j(s(psi))`` applied to ``xi``, i.e. ``s(phi) xi s(psi)``."""
        return self.apply(0.0, xi)

    def apply(self, z, xi: StandardVector) -> StandardVector:
        if xi.algebra != self.phi.algebra:
            raise InputError("vector and operator live on different algebras")
        left = self.phi.powers(z)
        right = self.psi.powers(-z)
        return StandardVector(xi.algebra, tuple(a @ b @ c for a, b, c in zip(left, xi.blocks, right)))


def apply_delta_power(delta: RelativeModularOperator, z, xi: StandardVector) -> StandardVector:
    """``Delta^z xi`` for complex ``z`` (only ``Re z`` in ``[-1, 1]`` is exercised)."""
    return delta.apply(z, xi)


def _check_s(s) -> float:
    s = float(s)
    if not (0.0 <= s <= 1.0):
        raise InputError(f"s must lie in [0, 1], got {s}")
    return s


def overlap_F(eta: NormalFunctional, phi: NormalFunctional, s: float) -> float:
    """``||Delta_{eta,phi}^{s/2} xi_phi||^2 = sum_k Tr(D_eta^s D_phi^{1-s})``.

    The endpoints follow the support convention: ``s = 0`` gives
    ``Tr(s(eta) D_phi)`` and ``s = 1`` gives ``Tr(D_eta s(phi))``.
    """
    s = _check_s(s)
    _same_algebra(eta, phi)
    a = eta.powers(s)
    b = phi.powers(1.0 - s)
    # Tr(A B) for Hermitian A, B is real; einsum avoids the full product
    return float(sum(np.einsum("ij,ji->", x, y).real for x, y in zip(a, b)))


def overlap_superoperator(eta: NormalFunctional, phi: NormalFunctional, s: float) -> float:
    """Same quantity as :func:`overlap_F`, computed as a norm in the standard space."""
    s = _check_s(s)
    delta = RelativeModularOperator(eta, phi)
    return apply_delta_power(delta, s / 2.0, xi_of(phi)).norm_sq()


@dataclass(frozen=True, eq=False)
class ConnesCocycle:
    """Radon-Nikodym cocycle ``(D phi : D psi)`` continued to imaginary times.

    ``lambda_star`` is the largest ``lam`` with ``lam * phi <= psi`` (zero when
    the support of ``phi`` is not contained in that of ``psi``).
    """

    phi: NormalFunctional
    psi: NormalFunctional

    def __post_init__(self):
        _same_algebra(self.phi, self.psi)

    @cached_property
    def support_contained(self) -> bool:
        ref = max(self.phi.scale, 1e-300)
        for d, p in zip(self.phi.densities, self.psi.support()):
            if op_norm(d - p @ d @ p) > 1e-9 * ref:
                return False
        return True

    @cached_property
    def lambda_star(self) -> float:
        if not self.support_contained:
            return 0.0
        if self.phi.rank() == 0:
            return float("inf")
        # lam * phi <= psi  <=>  lam * D_psi^{-1/2} D_phi D_psi^{-1/2} <= s(psi)
        worst = 0.0
        for d, r in zip(self.phi.densities, self.psi.powers(-0.5)):
            worst = max(worst, op_norm(r @ d @ r))
        return 1.0 / worst

    def at(self, s: float) -> list[np.ndarray]:
        return cocycle_at(self, s)


def cocycle_at(c: ConnesCocycle, s: float) -> list[np.ndarray]:
    """``(D phi : D psi)_{-i s} = D_phi^s D_psi^{-s}`` blockwise.

    Raises:
        DomainError: if the support of ``phi`` is not inside the support of ``psi``.
    """
    if not c.support_contained:
        raise DomainError("cocycle continuation needs supp(phi) inside supp(psi)")
    return [a @ b for a, b in zip(c.phi.powers(s), c.psi.powers(-s))]


def _core_vector(psi: NormalFunctional, x: Sequence, zeta: StandardVector) -> StandardVector:
    xs = psi.algebra.check_blocks(list(x))
    blocks = []
    for xk, rk, sk, zk in zip(xs, psi.powers(0.5), psi.support(), zeta.blocks):
        blocks.append(xk @ rk + zk @ (np.eye(sk.shape[0]) - sk))
    return StandardVector(psi.algebra, tuple(blocks))


def s_operator_apply(phi: NormalFunctional, psi: NormalFunctional, x: Sequence, zeta: StandardVector) -> StandardVector:
    """``S_{phi,psi}(x xi_psi + (1 - j(s(psi))) zeta) = s(psi) x^* xi_phi``."""
    _same_algebra(phi, psi)
    xs = phi.algebra.check_blocks(list(x))
    blocks = tuple(sk @ xk.conj().T @ rk for sk, xk, rk in zip(psi.support(), xs, phi.powers(0.5)))
    return StandardVector(phi.algebra, blocks)


def s_operator_via_delta(phi: NormalFunctional, psi: NormalFunctional, x: Sequence, zeta: StandardVector) -> StandardVector:
    """The same vector computed as ``J Delta_{phi,psi}^{1/2}`` on the core vector."""
    v = _core_vector(psi, x, zeta)
    return apply_J(apply_delta_power(RelativeModularOperator(phi, psi), 0.5, v))
