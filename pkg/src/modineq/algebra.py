"""Finite-dimensional von Neumann algebras and their normal functionals.

An algebra is a direct sum of full matrix algebras ``M_{n_1} + ... + M_{n_K}``.
A normal functional is stored through its density with respect to the
block trace: ``f(x) = sum_k Tr(D_k x_k)``.  Positive functionals have PSD
densities; differences of them are :class:`HermitianFunctional`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from numbers import Real
from typing import Sequence

import numpy as np

from .errors import DomainError, InputError, NotPSDError
from .numerics import (
    DEFAULT_TOL,
    SpectralDecomposition,
    TolerancePolicy,
    eigh,
    hermitian,
    jordan_parts,
    op_norm,
)

__all__ = [
    "MAX_BLOCK_DIM",
    "MAX_TOTAL_DIM",
    "Algebra",
    "HermitianFunctional",
    "NormalFunctional",
    "JordanDecomposition",
    "evaluate",
    "leq",
    "jordan",
    "orthogonal",
    "compress",
    "compress_operator",
    "order_scale",
]

MAX_BLOCK_DIM = 256
# sum of n_k**2, i.e. the complex dimension of the algebra
MAX_TOTAL_DIM = 4 * MAX_BLOCK_DIM**2


@dataclass(frozen=True)
class Algebra:
    """``M_{n_1}(C) + ... + M_{n_K}(C)`` described by its block sizes."""

    blocks: tuple[int, ...]

    def __post_init__(self):
        blocks = tuple(int(n) for n in self.blocks)
        if not blocks:
            raise InputError("an algebra needs at least one block")
        if any(n < 1 for n in blocks):
            raise InputError(f"block sizes must be positive, got {blocks}")
        if max(blocks) > MAX_BLOCK_DIM:
            raise InputError(f"block size {max(blocks)} exceeds the cap {MAX_BLOCK_DIM}")
        if sum(n * n for n in blocks) > MAX_TOTAL_DIM:
            raise InputError(f"algebra dimension exceeds the cap {MAX_TOTAL_DIM}")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def of(cls, *blocks: int) -> "Algebra":
        return cls(tuple(blocks))

    @property
    def hilbert_dim(self) -> int:
        return sum(self.blocks)

    def identity(self) -> list[np.ndarray]:
        return [np.eye(n, dtype=complex) for n in self.blocks]

    def zeros(self) -> list[np.ndarray]:
        return [np.zeros((n, n), dtype=complex) for n in self.blocks]

    def check_blocks(self, blocks: Sequence) -> list[np.ndarray]:
        """Coerce a per-block operator list and validate its shapes."""
        if len(blocks) != len(self.blocks):
            raise InputError(f"expected {len(self.blocks)} blocks, got {len(blocks)}")
        out = []
        for k, (b, n) in enumerate(zip(blocks, self.blocks)):
            m = np.asarray(b, dtype=complex)
            if m.shape != (n, n):
                raise InputError(f"block {k}: expected shape {(n, n)}, got {m.shape}")
            if not np.all(np.isfinite(m)):
                raise InputError(f"block {k}: non-finite entries")
            out.append(m)
        return out


@dataclass(frozen=True, eq=False)
class HermitianFunctional:
    """Hermitian normal functional ``x -> sum_k Tr(D_k x_k)``."""

    algebra: Algebra
    densities: tuple[np.ndarray, ...]
    tol: TolerancePolicy = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        blocks = self.algebra.check_blocks(list(self.densities))
        object.__setattr__(self, "densities", tuple(hermitian(b) for b in blocks))

    @classmethod
    def from_blocks(cls, blocks: Sequence, algebra: Algebra | None = None, tol: TolerancePolicy = DEFAULT_TOL):
        blocks = [np.atleast_2d(np.asarray(b, dtype=complex)) for b in blocks]
        if algebra is None:
            algebra = Algebra(tuple(b.shape[0] for b in blocks))
        return cls(algebra, tuple(blocks), tol)

    @classmethod
    def zero(cls, algebra: Algebra, tol: TolerancePolicy = DEFAULT_TOL):
        return cls(algebra, tuple(algebra.zeros()), tol)

    @cached_property
    def spectra(self) -> tuple[SpectralDecomposition, ...]:
        return tuple(eigh(d) for d in self.densities)

    @cached_property
    def scale(self) -> float:
        """Largest absolute eigenvalue over all blocks."""
        return max(sd.norm for sd in self.spectra)

    @property
    def mass(self) -> float:
        """The value on the identity, ``f(1)``."""
        return float(sum(np.trace(d).real for d in self.densities))

    def __call__(self, x=None) -> complex:
        if x is None:
            return self.mass
        return evaluate(self, x)

    def _combine(self, other, sign):
        if not isinstance(other, HermitianFunctional):
            return NotImplemented
        if other.algebra != self.algebra:
            raise InputError(f"algebra mismatch: {self.algebra.blocks} vs {other.algebra.blocks}")
        blocks = tuple(a + sign * b for a, b in zip(self.densities, other.densities))
        if sign > 0 and isinstance(self, NormalFunctional) and isinstance(other, NormalFunctional):
            return NormalFunctional(self.algebra, blocks, self.tol)
        return HermitianFunctional(self.algebra, blocks, self.tol)

    def __add__(self, other):
        return self._combine(other, 1.0)

    def __sub__(self, other):
        return self._combine(other, -1.0)

    def __neg__(self):
        return HermitianFunctional(self.algebra, tuple(-d for d in self.densities), self.tol)

    def __mul__(self, c):
        if not isinstance(c, Real):
            return NotImplemented
        blocks = tuple(float(c) * d for d in self.densities)
        if c >= 0 and isinstance(self, NormalFunctional):
            return NormalFunctional(self.algebra, blocks, self.tol)
        return HermitianFunctional(self.algebra, blocks, self.tol)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self * (1.0 / c)

    def with_tol(self, tol: TolerancePolicy):
        return type(self)(self.algebra, self.densities, tol)

    def to_normal(self, reference: float | None = None) -> "NormalFunctional":
        """Reinterpret as a positive functional; roundoff negatives are clipped.

        ``reference`` is the magnitude against which negativity and the support
        cut are judged; pass the scale of the operands when ``self`` is a
        difference that may cancel.  Eigenvalues under the cut are zeroed.

        Raises:
            NotPSDError: for material negative eigenvalues.
        """
        scale = max(self.scale, reference or 0.0)
        blocks = []
        for sd in self.spectra:
            lam = sd.clipped(self.tol, scale)
            lam = np.where(lam > self.tol.support_cut * scale, lam, 0.0)
            blocks.append(sd.apply(lambda _: lam))
        return NormalFunctional(self.algebra, tuple(blocks), self.tol)

    def allclose(self, other: "HermitianFunctional", rtol: float = 1e-10) -> bool:
        ref = max(self.scale, other.scale, 1.0)
        return all(op_norm(a - b) <= rtol * ref for a, b in zip(self.densities, other.densities))


class NormalFunctional(HermitianFunctional):
    """Positive normal functional; every density is PSD up to ``psd_slack``."""

    def __post_init__(self):
        super().__post_init__()
        scale = self.scale
        for k, sd in enumerate(self.spectra):
            if sd.dim and sd.eigenvalues[0] < -self.tol.psd_slack * scale:
                raise NotPSDError(f"density of block {k} has eigenvalue {sd.eigenvalues[0]:.3e} < 0")

    def powers(self, z) -> list[np.ndarray]:
        """Blockwise pseudo-powers ``D_k ** z`` with a cut relative to the global scale."""
        scale = self.scale
        return [sd.power(z, self.tol, scale) for sd in self.spectra]

    def support(self) -> list[np.ndarray]:
        return self.powers(0.0)

    def support_bases(self) -> list[np.ndarray]:
        scale = self.scale
        return [sd.support_basis(self.tol, scale) for sd in self.spectra]

    def rank(self) -> int:
        return sum(b.shape[1] for b in self.support_bases())

    def is_faithful(self) -> bool:
        return self.rank() == self.algebra.hilbert_dim


@dataclass(frozen=True)
class JordanDecomposition:
    """``d = plus - minus`` with orthogonally supported positive parts."""

    plus: NormalFunctional
    minus: NormalFunctional

    @property
    def abs(self) -> NormalFunctional:
        return self.plus + self.minus


def _same_algebra(*fs: HermitianFunctional):
    first = fs[0].algebra
    for f in fs[1:]:
        if f.algebra != first:
            raise InputError(f"algebra mismatch: {first.blocks} vs {f.algebra.blocks}")


def evaluate(f: HermitianFunctional, x: Sequence) -> complex:
    """``f(x) = sum_k Tr(D_k x_k)`` for a block operator ``x``."""
    xs = f.algebra.check_blocks(list(x))
    return complex(sum(np.trace(d @ xk) for d, xk in zip(f.densities, xs)))


def order_scale(*fs: HermitianFunctional) -> float:
    return max([abs(f.mass) for f in fs] + [1.0])


def leq(f: HermitianFunctional, g: HermitianFunctional, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    """``f <= g`` in the order of positive functionals, up to ``ineq_slack``."""
    _same_algebra(f, g)
    slack = tol.ineq_slack * order_scale(f, g)
    return all(sd.eigenvalues[0] >= -slack for sd in (g - f).spectra)


def jordan(d: HermitianFunctional) -> JordanDecomposition:
    """Blockwise positive/negative parts of a Hermitian functional."""
    plus, minus = [], []
    for sd in d.spectra:
        p, n = jordan_parts(sd)
        plus.append(p)
        minus.append(n)
    return JordanDecomposition(
        NormalFunctional(d.algebra, tuple(plus), d.tol),
        NormalFunctional(d.algebra, tuple(minus), d.tol),
    )


def orthogonal(f: NormalFunctional, g: NormalFunctional, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    """Supports of ``f`` and ``g`` are orthogonal in every block."""
    _same_algebra(f, g)
    return all(op_norm(p @ q) <= tol.ineq_slack for p, q in zip(f.support(), g.support()))


def _compression_bases(algebra: Algebra, e: Sequence) -> list[np.ndarray]:
    bases = []
    for k, ek in enumerate(algebra.check_blocks(list(e))):
        sd = eigh(ek)
        lam = sd.eigenvalues
        if np.any(np.abs(lam * (lam - 1.0)) > 1e-8):
            raise InputError(f"block {k} of the compression is not a projection")
        bases.append(sd.eigenvectors[:, lam > 0.5])
    return bases


def compress(f: NormalFunctional, e: Sequence) -> NormalFunctional:
    """Restrict ``f`` to the corner algebra ``e M e``.

    Blocks where ``e`` vanishes are dropped; the remaining blocks are expressed
    in an orthonormal basis of the range of ``e`` (see :func:`compress_operator`).

    Raises:
        DomainError: if ``e`` does not dominate the support of ``f``.
    """
    bases = _compression_bases(f.algebra, e)
    ref = max(f.scale, 1e-300)
    for k, (v, d) in enumerate(zip(bases, f.densities)):
        outside = d - v @ (v.conj().T @ d @ v) @ v.conj().T
        if op_norm(outside) > 1e-9 * ref:
            raise DomainError(f"projection does not dominate the support in block {k}")
    kept = [(v, d) for v, d in zip(bases, f.densities) if v.shape[1] > 0]
    if not kept:
        raise DomainError("compression onto the zero projection")
    algebra = Algebra(tuple(v.shape[1] for v, _ in kept))
    return NormalFunctional(algebra, tuple(v.conj().T @ d @ v for v, d in kept), f.tol)


def compress_operator(algebra: Algebra, x: Sequence, e: Sequence) -> list[np.ndarray]:
    """Express ``e x e`` as an element of the compressed algebra used by :func:`compress`."""
    bases = _compression_bases(algebra, e)
    xs = algebra.check_blocks(list(x))
    return [v.conj().T @ xk @ v for v, xk in zip(bases, xs) if v.shape[1] > 0]
