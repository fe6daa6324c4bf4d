"""Exception hierarchy.

Validation errors (bad arguments, bad config, structural mismatches) map to
CLI exit code 1; numerical failures discovered while running map to exit
code 2.
"""


class AmariflowError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(AmariflowError, ValueError):
    """Bad input: rejected before any numerics run. CLI exit code 1."""


class NumericalError(AmariflowError, RuntimeError):
    """Numerical failure detected while running. CLI exit code 2."""


# -- validation --------------------------------------------------------------

class RangeError(ValidationError):
    """Parameter outside its admissible range."""


class InvalidDomainError(ValidationError):
    """Degenerate interval or grid (a >= b, n < 1, unknown boundary)."""


class GridMismatchError(ValidationError):
    """Fields or operators built on different grids were combined."""


class EmptyPointSetError(ValidationError):
    """A Gram check needs at least one point."""


class AtomicSpectrumError(ValidationError):
    """The kernel's spectral measure has atoms: no density to evaluate."""


class RankExceededError(ValidationError):
    """More modes requested than the decomposition retains."""


class DimensionMismatchError(ValidationError):
    """Vector lengths disagree (mode coefficients, custom noise weights)."""


class NonpositiveEigenvalueError(ValidationError):
    """A positive eigenvalue was required (division by lambda)."""


class InsufficientDataError(ValidationError):
    """Too few samples for the requested statistic."""


class ParseError(ValidationError):
    """Config text could not be parsed; carries line/column context."""


class UnknownKeyError(ValidationError):
    """Config key is not in the schema; carries section and line."""


# -- numerical ---------------------------------------------------------------

class NotNonnegativeError(NumericalError):
    """Discretized operator has an eigenvalue below -neg_tol * max|lambda|."""


class NotInSError(NumericalError):
    """Field has a component outside the operator's range space S."""


class BlowUpError(NumericalError):
    """Trajectory left the trust region |u| <= clamp; step and time attached."""

    def __init__(self, message, step=None, time=None):
        super().__init__(message)
        self.step = step
        self.time = time
