"""Exception types shared across the library."""


class DimensionError(ValueError):
    """Operand shapes or lengths are incompatible."""


class FormatError(ValueError):
    """A matrix violates a storage-format invariant (bad index, bad pointers)."""


class ParseError(ValueError):
    """A file could not be parsed; carries the offending line number when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ParameterError(ValueError):
    """A problem or plan parameter is out of its legal range."""


class SingularPreconditionerError(ValueError):
    """The preconditioner cannot be built (zero diagonal entry)."""


class BreakdownError(ArithmeticError):
    """A Krylov recurrence hit a numerically zero denominator.

    The partial solve report accumulated so far is attached as ``report``
    (None when breakdown happened before any bookkeeping existed).
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
