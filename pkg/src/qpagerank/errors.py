"""Exception hierarchy shared by all modules."""


class QPageRankError(Exception):
    """Base class for every error raised by the package."""


class DomainError(QPageRankError, ValueError):
    """An argument lies outside the domain the operation accepts."""


class ParseError(QPageRankError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class IntegrityError(QPageRankError, ValueError):
    """A matrix or vector violates a structural invariant (e.g. column sums)."""


class ConvergenceError(QPageRankError, RuntimeError):
    def __init__(self, message, residual=None):
        self.residual = residual
        super().__init__(message)


class NumericError(QPageRankError, ArithmeticError):
    """A numerical check (residual, orthogonality, norm) failed."""


class CapacityError(QPageRankError, MemoryError):
    """The requested problem is too large for a dense computation."""
