"""Exception hierarchy.

Two families matter to callers (and to the CLI exit codes): input
problems (``ValidationError``) and numerical breakdowns
(``NumericalError``).
"""


class ChainError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(ChainError, ValueError):
    """Input does not satisfy a structural precondition."""


class NotStochasticError(ValidationError):
    def __init__(self, message, row=None, deviation=None):
        super().__init__(message)
        self.row = row
        self.deviation = deviation


class ReducibleChainError(ValidationError):
    pass


class InvalidSubsetError(ValidationError):
    pass


class FormatError(ValidationError):
    """Malformed matrix/vector file; carries the 1-based line and column."""

    def __init__(self, message, line=None, column=None):
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)
        self.line = line
        self.column = column


class UnknownFamilyError(ValidationError):
    pass


class NumericalError(ChainError, ArithmeticError):
    """A computation could not be completed in floating point."""


class ZeroDenominatorError(NumericalError):
    def __init__(self, level, message=None):
        super().__init__(
            message
            or f"elimination denominator is zero at level {level} "
            "(state cannot leave to lower states; chain is reducible)"
        )
        self.level = level


class SingularComplementError(NumericalError):
    pass


class PivotUnderflowError(NumericalError):
    def __init__(self, level, pivot):
        super().__init__(f"pivot {pivot!r} at level {level} is below machine epsilon")
        self.level = level
        self.pivot = pivot


class NonConvergenceError(NumericalError):
    def __init__(self, message, gap=None):
        super().__init__(message)
        self.gap = gap


class SingularSystemError(NumericalError):
    pass
