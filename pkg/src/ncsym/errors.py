"""Exception hierarchy shared by every ncsym module."""


class NcSymError(Exception):
    """Base class for all ncsym errors."""


class InvalidInputError(NcSymError, ValueError):
    """Malformed input: wrong shape, non-finite entries, bad arity."""


class SingularMatrixError(NcSymError, ArithmeticError):
    """A matrix that had to be inverted is numerically singular."""

    def __init__(self, message, smallest_sv=None, which=None):
        super().__init__(message)
        self.smallest_sv = smallest_sv
        self.which = which


class DomainError(NcSymError, ValueError):
    """A point lies outside the domain where an operation is defined."""


class ContractViolation(NcSymError):
    """A user-supplied oracle returned data of the wrong shape."""


class DomainTooTightError(NcSymError):
    """No admissible similarity could be found inside the declared domain."""


class GramMismatchError(NcSymError):
    """Two vector families do not have equal Gram matrices."""

    def __init__(self, message, mismatch):
        super().__init__(message)
        self.mismatch = mismatch


class PaddingError(NcSymError):
    """A partial isometry cannot be extended to a unitary."""


class PreconditionError(NcSymError, ValueError):
    """A documented precondition of an operation does not hold."""


class StageError(NcSymError):
    """A stage of the realization pipeline exceeded its tolerance."""

    def __init__(self, stage, residual, tol, message=None):
        super().__init__(message or f"stage {stage!r}: residual {residual:.3e} > tol {tol:.1e}")
        self.stage = stage
        self.residual = residual
        self.tol = tol


class ParseError(NcSymError, ValueError):
    """Polynomial text could not be parsed."""

    def __init__(self, message, line, column):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class MissingSampleError(NcSymError, KeyError):
    """A point needed by a sampled construction is not in the sample set."""

    def __str__(self):
        return str(self.args[0]) if self.args else "missing sample"


class DegenerateSpanWarning(UserWarning):
    """A lurking family spans (numerically) nothing, e.g. only diagonal samples."""
