"""Exception types shared across the package."""


class DelibError(Exception):
    """Base class for every error raised by this package."""


class IdentityError(DelibError):
    """An operation referenced an unknown or inactive participant or idea."""


class ParameterError(DelibError):
    """An argument or configuration value is outside its allowed range."""


class UndefinedRateError(ParameterError):
    """A completion rate was requested over an empty matrix."""


class EmptyRankingError(ParameterError):
    """A ranking was requested while no ideas exist."""


class CapacityError(DelibError):
    """An exact computation would exceed its enumeration cap."""


class NumericalError(DelibError):
    """An iterative numerical routine failed to converge.

    Carries the last residual so callers can judge how far off it was.
    """

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class FormatError(DelibError):
    """An input file does not conform to the expected format."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = ""
        if line is not None:
            where += f" (line {line}"
            where += f", column {column})" if column is not None else ")"
        super().__init__(message + where)
        self.line = line
        self.column = column


class FrozenMatrixError(DelibError):
    """A mutation was attempted on a matrix snapshot."""
