"""Hermitian matrix calculus on top of LAPACK's ``eigh``.

Every function of a matrix used in the package goes through a
:class:`SpectralDecomposition`.  Powers are *pseudo*-powers: the scalar
rule ``lam ** z`` is applied on eigenvalues above a relative cut and ``0`` on
the rest, so ``pseudo_power(H, 0)`` is the support projection of ``H`` and
negative exponents act as generalised inverses on the support.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, NotPSDError

__all__ = [
    "TolerancePolicy",
    "DEFAULT_TOL",
    "SpectralDecomposition",
    "hermitian",
    "eigh",
    "pseudo_power",
    "jordan_parts",
    "support_proj",
    "projection_join",
    "is_projection",
    "trace",
    "trace_norm",
    "op_norm",
    "abs_val",
]


@dataclass(frozen=True)
class TolerancePolicy:
    """Numerical thresholds shared by every verdict in the package.

    Attributes:
        support_cut: eigenvalues ``<= support_cut * scale`` count as zero.
        psd_slack: negative eigenvalues down to ``-psd_slack * scale`` are
            treated as roundoff and clipped to zero.
        ineq_slack: an inequality ``lhs <= rhs`` passes when
            ``rhs - lhs >= -ineq_slack * scale``.
    """

    support_cut: float = 1e-10
    psd_slack: float = 1e-10
    ineq_slack: float = 1e-9

    def __post_init__(self):
        for name in ("support_cut", "psd_slack", "ineq_slack"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise InputError(f"tolerance {name} must be a positive finite number, got {value!r}")

    def replace(self, **changes) -> "TolerancePolicy":
        fields = {k: getattr(self, k) for k in ("support_cut", "psd_slack", "ineq_slack")}
        fields.update({k: v for k, v in changes.items() if v is not None})
        return TolerancePolicy(**fields)


DEFAULT_TOL = TolerancePolicy()


def hermitian(a) -> np.ndarray:
    """Return ``a`` as a complex square matrix symmetrised to be exactly Hermitian."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InputError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InputError("matrix has non-finite entries")
    return 0.5 * (m + m.conj().T)


@dataclass(frozen=True)
class SpectralDecomposition:
    """``H = U diag(eigenvalues) U*`` with eigenvalues in ascending order."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def norm(self) -> float:
        if self.dim == 0:
            return 0.0
        return float(max(abs(self.eigenvalues[0]), abs(self.eigenvalues[-1])))

    def reconstruct(self) -> np.ndarray:
        return self.apply(lambda lam: lam)

    def apply(self, func) -> np.ndarray:
        """Matrix function ``U diag(func(eigenvalues)) U*``."""
        u = self.eigenvectors
        vals = np.asarray(func(self.eigenvalues))
        return (u * vals) @ u.conj().T

    def clipped(self, tol: TolerancePolicy = DEFAULT_TOL, scale: float | None = None) -> np.ndarray:
        """Eigenvalues with roundoff negatives clipped to zero.

        Raises:
            NotPSDError: if some eigenvalue is below ``-psd_slack * scale``.
        """
        ref = self.norm if scale is None else scale
        lam = self.eigenvalues
        if lam.size and lam[0] < -tol.psd_slack * ref:
            raise NotPSDError(
                f"matrix is not positive semidefinite: eigenvalue {lam[0]:.3e} below "
                f"-{tol.psd_slack:.1e} * {ref:.3e}"
            )
        return np.clip(lam, 0.0, None)

    def support_mask(self, tol: TolerancePolicy = DEFAULT_TOL, scale: float | None = None) -> np.ndarray:
        lam = self.clipped(tol, scale)
        ref = self.norm if scale is None else scale
        return lam > tol.support_cut * ref

    def power(self, z, tol: TolerancePolicy = DEFAULT_TOL, scale: float | None = None) -> np.ndarray:
        lam = self.clipped(tol, scale)
        mask = self.support_mask(tol, scale)
        z = complex(z)
        if z.imag == 0.0:
            vals = np.zeros(lam.shape)
            vals[mask] = lam[mask] ** z.real
            out = self.apply(lambda _: vals)
            return 0.5 * (out + out.conj().T)
        vals = np.zeros(lam.shape, dtype=complex)
        vals[mask] = np.exp(z * np.log(lam[mask]))
        return self.apply(lambda _: vals)

    def support_basis(self, tol: TolerancePolicy = DEFAULT_TOL, scale: float | None = None) -> np.ndarray:
        """Orthonormal columns spanning the support, in descending eigenvalue order."""
        mask = self.support_mask(tol, scale)
        return self.eigenvectors[:, mask][:, ::-1]


def eigh(h) -> SpectralDecomposition:
    """Eigendecomposition of a Hermitian matrix (symmetrised on entry).

    >>> eigh([[0, 1], [1, 0]]).eigenvalues
    array([-1.,  1.])
    """
    m = hermitian(h)
    lam, u = np.linalg.eigh(m)
    return SpectralDecomposition(lam, u)


def _spectral(h) -> SpectralDecomposition:
    return h if isinstance(h, SpectralDecomposition) else eigh(h)


def pseudo_power(h, z, tol: TolerancePolicy = DEFAULT_TOL, scale: float | None = None) -> np.ndarray:
    """``H ** z`` on the support of a PSD matrix, zero on its kernel.

    ``z`` may be any complex number; negative real parts give powers of the
    generalised inverse.  ``scale`` overrides the reference magnitude used by
    the support cut (callers pass the global scale of a multi-block object).
    """
    return _spectral(h).power(z, tol, scale)


def jordan_parts(h) -> tuple[np.ndarray, np.ndarray]:
    """Split a Hermitian matrix into orthogonally supported PSD parts ``H = P - N``."""
    sd = _spectral(h)
    lam = sd.eigenvalues
    pos = sd.apply(lambda _: np.where(lam > 0, lam, 0.0))
    neg = sd.apply(lambda _: np.where(lam < 0, -lam, 0.0))
    return pos, neg


def support_proj(h, tol: TolerancePolicy = DEFAULT_TOL, scale: float | None = None) -> np.ndarray:
    """Orthogonal projection onto the range of a PSD matrix."""
    return pseudo_power(h, 0.0, tol, scale)


def is_projection(p, atol: float = 1e-8) -> bool:
    m = np.asarray(p, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return bool(np.allclose(m, m.conj().T, atol=atol) and np.allclose(m @ m, m, atol=atol))


def projection_join(p, q, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Smallest projection dominating both ``p`` and ``q`` (support of ``p + q``)."""
    if not (is_projection(p) and is_projection(q)):
        raise InputError("projection_join expects two orthogonal projections")
    p = hermitian(p)
    q = hermitian(q)
    if p.shape != q.shape:
        raise InputError(f"shape mismatch {p.shape} vs {q.shape}")
    # p + q has spectrum in [0, 2]; a fixed reference keeps the cut absolute
    return support_proj(p + q, tol, scale=1.0)


def trace(h) -> complex:
    return complex(np.trace(np.asarray(h)))


def trace_norm(h) -> float:
    return float(np.sum(np.abs(_spectral(h).eigenvalues)))


def op_norm(a) -> float:
    m = np.asarray(a)
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def abs_val(h) -> np.ndarray:
    sd = _spectral(h)
    return sd.apply(np.abs)
