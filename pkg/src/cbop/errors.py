"""Exception hierarchy shared by all modules."""


class CbopError(Exception):
    """Base class."""


class DomainError(CbopError, ValueError):
    """Argument outside the region where the quantity is defined."""


class NumericalError(CbopError, ArithmeticError):
    """A computation lost too much accuracy to be trusted at this precision."""


class PrecisionError(NumericalError):
    """Residuals exceed tolerance; rerunning with more bits is the remedy."""


class ConvergenceError(CbopError, RuntimeError):
    """Iteration did not meet its tolerance within max_iter steps."""

    def __init__(self, message, last_residual=None, trace=None):
        super().__init__(message)
        self.last_residual = last_residual
        self.trace = trace or []


class SzegoConditionError(NumericalError):
    """Density not positive (or log not finite) on the quadrature grid."""


class ConfigError(CbopError, ValueError):
    """Bad configuration text, with a location when one is known."""

    def __init__(self, message, line=None, column=None):
        loc = f"line {line}" + (f", column {column}" if column else "") + ": " if line else ""
        super().__init__(loc + message)
        self.line = line
        self.column = column
