"""Exception and warning types raised across the package."""


class ModineqError(Exception):
    """Base class for all package errors."""


class InputError(ModineqError, ValueError):
    """Malformed input: shapes, non-finite entries, out-of-range parameters."""


class NotPSDError(InputError):
    """A matrix expected to be positive semidefinite has a material negative eigenvalue."""


class DomainError(ModineqError, ValueError):
    """An operation was asked for outside its mathematical domain (e.g. support violations)."""


class PreconditionError(ModineqError, ValueError):
    """Order hypotheses required by a verifier do not hold."""


class ConvergenceError(ModineqError, RuntimeError):
    """Quadrature or iterative refinement failed to reach its target."""


class ConditioningWarning(UserWarning):
    """Ill-conditioned input; oracle accuracy may degrade."""
