"""Relative modular operators, overlap inequalities and Chernoff bounds in finite dimension."""

__version__ = "0.1.0"

from .algebra import Algebra, HermitianFunctional, JordanDecomposition, NormalFunctional, compress, evaluate, jordan, leq, orthogonal
from .errors import ConditioningWarning, ConvergenceError, DomainError, InputError, ModineqError, NotPSDError, PreconditionError
from .inequalities import (
    S_GRID,
    EqualityCertificate,
    VerificationReport,
    certify_equality,
    construct_equality_instance,
    verify_continuity,
    verify_corollary,
    verify_diff_monotonicity,
    verify_lemma_ec,
    verify_main,
)
from .numerics import DEFAULT_TOL, TolerancePolicy
from .standard_form import ConnesCocycle, RelativeModularOperator, StandardVector, overlap_F, xi_of
