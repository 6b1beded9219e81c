"""Exception hierarchy shared by all modules."""


class LpplPmError(Exception):
    """Base class for every error raised by this package."""


class ParseError(LpplPmError, ValueError):
    """Malformed input: bad CSV row, bad date, unordered dates."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DataError(LpplPmError, ValueError):
    """Values that parse but violate the data model (non-finite, non-positive)."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class GapError(DataError):
    """Missing days under the ``reject`` gap policy."""


class RangeError(LpplPmError, IndexError):
    pass


class DomainError(LpplPmError, ValueError):
    """Argument outside the domain of a closed-form expression."""


class ShapeError(LpplPmError, ValueError):
    pass


class DegenerateBasisError(LpplPmError, ArithmeticError):
    """The LPPL design matrix is numerically rank deficient."""


class NoFeasibleFitError(LpplPmError, RuntimeError):
    """No multi-start candidate satisfied the fit constraints."""


class InsufficientExtremaError(LpplPmError, ValueError):
    pass


class InvalidWindowError(LpplPmError, ValueError):
    pass


class OrderError(LpplPmError, ValueError):
    """Input expected to be sorted by date is not."""


class InsufficientHistoryError(LpplPmError, ValueError):
    pass


class SingularExponentError(DomainError):
    """delta == 2 makes the degradation-path exponent vanish."""
