"""Exception hierarchy shared by every module of the package."""


class SympFactError(Exception):
    """Base class for all errors raised by sympfact."""


class DivisionByZero(SympFactError, ZeroDivisionError):
    pass


class NotDivisibleError(SympFactError, ArithmeticError):
    """Exact division requested but the divisor does not divide the dividend."""

    def __init__(self, message, dividend=None, divisor=None):
        super().__init__(message)
        self.dividend = dividend
        self.divisor = divisor


class DimensionError(SympFactError, ValueError):
    pass


class NotInvertibleError(SympFactError, ArithmeticError):
    def __init__(self, message, det=None):
        super().__init__(message)
        self.det = det


class PreconditionError(SympFactError, ValueError):
    """A mathematical precondition of an operation does not hold (det != 1, ...)."""


class UnsupportedRingError(SympFactError, TypeError):
    pass


class ConsistencyError(SympFactError, AssertionError):
    """An internal invariant failed. This indicates a bug, not bad input."""


class SamplingError(SympFactError, ValueError):
    """A sampled loop is not adequate for a reliable winding number."""


class ParseError(SympFactError, ValueError):
    def __init__(self, message, text=None, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.text = text
        self.position = position
