"""Exception hierarchy shared by the library and the CLI exit-code mapping."""


class QTunnelError(Exception):
    """Base class for all package errors."""


class DomainError(QTunnelError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class InputFormatError(QTunnelError, ValueError):
    """CSV input does not follow the expected layout.

    ``line`` is the 1-based line number when the problem is row-level.
    """

    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column


class IntegrityError(InputFormatError):
    """Structurally valid input violating a series rule (e.g. duplicate dates)."""


class InsufficientDataError(QTunnelError, ValueError):
    """Not enough bars for the requested window."""

    def __init__(self, message, required=None, available=None):
        super().__init__(message)
        self.required = required
        self.available = available


class NumericError(QTunnelError, ArithmeticError):
    """A numerical routine failed to reach its tolerance."""


class QuadratureError(NumericError):
    """Adaptive quadrature exhausted its evaluation budget."""

    def __init__(self, message, estimate, error, evaluations):
        super().__init__(message)
        self.estimate = estimate
        self.error = error
        self.evaluations = evaluations


class EigenSolverError(NumericError):
    """Tridiagonal eigensolver did not converge."""

    def __init__(self, message, info=None):
        super().__init__(message)
        self.info = info
