"""Seeded generators for densities, functionals and verification instances.

Densities are ``G G^*`` for complex Gaussian ``G`` drawn from
:class:`~modineq.rng.CounterRNG`; rank-deficient variants use a rectangular
``G``.  Every generator takes an explicit stream, so instance ``i`` of a batch
with seed ``seed`` is ``CounterRNG(seed).spawn(i)`` regardless of how many
instances precede it.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import Algebra, NormalFunctional
from .errors import InputError
from .numerics import DEFAULT_TOL, TolerancePolicy
from .rng import CounterRNG

__all__ = [
    "BLOCK_PATTERNS",
    "KINDS",
    "Instance",
    "haar_unitary",
    "random_density",
    "random_functional",
    "conditioned_psd",
    "make_instance",
    "generate_batch",
]

BLOCK_PATTERNS = ((2,), (4,), (2, 3), (8,), (16,))
KINDS = ("random", "equality", "ordered-quadruple", "rank-deficient")


@dataclass
class Instance:
    """Named functionals on a common algebra, plus provenance metadata."""

    id: str
    algebra: Algebra
    functionals: dict[str, NormalFunctional]
    metadata: dict = field(default_factory=dict)

    def __getitem__(self, name: str) -> NormalFunctional:
        return self.functionals[name]


def haar_unitary(rng: CounterRNG, n: int) -> np.ndarray:
    """Haar-random unitary via QR of a complex Gaussian matrix with phase fixing."""
    q, r = np.linalg.qr(rng.complex_normal((n, n)))
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_density(rng: CounterRNG, n: int, rank: int | None = None) -> np.ndarray:
    """Unnormalised ``G G^*`` with ``G`` of shape ``n x rank``."""
    g = rng.complex_normal((n, n if rank is None else rank))
    d = g @ g.conj().T
    return 0.5 * (d + d.conj().T)


def random_functional(rng: CounterRNG, algebra: Algebra, mass: float | None = None,
                      rank_deficient: bool = False, tol: TolerancePolicy = DEFAULT_TOL) -> NormalFunctional:
    """Random positive functional with total mass ``mass`` (uniform in [0.5, 2] by default).

    With ``rank_deficient`` each block gets rank ``max(1, n // 2)``.
    """
    if mass is None:
        mass = rng.uniform(low=0.5, high=2.0)
    blocks = [random_density(rng, n, max(1, n // 2) if rank_deficient else None) for n in algebra.blocks]
    total = sum(np.trace(b).real for b in blocks)
    return NormalFunctional(algebra, tuple(b * (mass / total) for b in blocks), tol)


def conditioned_psd(rng: CounterRNG, n: int, max_condition: float = 1e6) -> np.ndarray:
    """PSD matrix with Haar eigenvectors and log-uniform spectrum.

    The condition number is itself log-uniform in ``[1, max_condition]`` and the
    largest eigenvalue is log-uniform in ``[0.1, 10]``.
    """
    u = haar_unitary(rng, n)
    top = 10.0 ** rng.uniform(low=-1.0, high=1.0)
    cond = 10.0 ** rng.uniform(low=0.0, high=np.log10(max_condition))
    lam = top * cond ** (-rng.uniform(n))
    lam[0] = top
    lam[-1] = top / cond if n > 1 else top
    h = (u * lam) @ u.conj().T
    return 0.5 * (h + h.conj().T)


def _increment(rng: CounterRNG, f: NormalFunctional, tol) -> NormalFunctional:
    return f + random_functional(rng, f.algebra, rng.uniform(low=0.1, high=1.0), tol=tol)


def make_instance(seed: int, index: int, blocks, kind: str = "random", ranks=None,
                  tol: TolerancePolicy = DEFAULT_TOL) -> Instance:
    """Instance ``index`` of the batch ``seed`` for one of :data:`KINDS`.

    ``random`` and ``rank-deficient`` give ``eta, phi``; ``equality`` gives an
    equality pair ``eta, phi`` (ranks drawn from the stream unless given);
    ``ordered-quadruple`` gives ``phi1 <= phi2`` and ``eta <= psi``.
    """
    from .inequalities import construct_equality_instance

    algebra = Algebra(tuple(blocks))
    rng = CounterRNG(seed).spawn(index)
    meta = {"seed": int(seed), "index": int(index), "kind": kind, "blocks": list(algebra.blocks)}
    if kind in ("random", "rank-deficient"):
        deficient = kind == "rank-deficient"
        fs = {
            "eta": random_functional(rng, algebra, rank_deficient=deficient, tol=tol),
            "phi": random_functional(rng, algebra, rank_deficient=deficient, tol=tol),
        }
    elif kind == "equality":
        if ranks is None:
            dim = algebra.hilbert_dim
            cuts = sorted(rng.integers(0, dim + 1) for _ in range(3))
            ranks = (cuts[0], cuts[1] - cuts[0], cuts[2] - cuts[1])
        ranks = tuple(int(r) for r in ranks)
        eta, phi = construct_equality_instance(algebra, ranks, int(rng.words(1)[0] >> np.uint64(1)), tol)
        fs = {"eta": eta, "phi": phi}
        meta["ranks"] = list(ranks)
    elif kind == "ordered-quadruple":
        phi1 = random_functional(rng, algebra, tol=tol)
        eta = random_functional(rng, algebra, tol=tol)
        fs = {"phi1": phi1, "phi2": _increment(rng, phi1, tol), "eta": eta, "psi": _increment(rng, eta, tol)}
    else:
        raise InputError(f"unknown instance kind {kind!r}; expected one of {KINDS}")
    return Instance(f"{kind}-{seed}-{index:05d}", algebra, fs, meta)


def generate_batch(seed: int, count: int, patterns=BLOCK_PATTERNS, kind: str = "random", ranks=None,
                   tol: TolerancePolicy = DEFAULT_TOL) -> list[Instance]:
    """``count`` instances cycling through ``patterns`` in order."""
    return [make_instance(seed, i, patterns[i % len(patterns)], kind, ranks, tol) for i in range(count)]
