"""Exception types shared by every module."""


class FqError(Exception):
    """Base class for all library errors."""


class DivisionByZero(FqError, ZeroDivisionError):
    pass


class SpecMismatch(FqError, ValueError):
    """Operands live over different finite fields."""


class UndeterminedToPrecision(FqError, ArithmeticError):
    """Every known coefficient vanishes and the series is not exact."""


class InsufficientTrust(FqError):
    """A continued fraction cannot be certified far enough."""


class PreconditionViolated(FqError, ValueError):
    pass


class KTooSmall(PreconditionViolated):
    pass


class HypothesisNotMet(PreconditionViolated):
    pass


class SearchSpaceTooLarge(FqError):
    pass


class TableExhausted(FqError):
    pass


class StrategyInapplicable(FqError):
    pass


class RationalSlopeInput(FqError, ValueError):
    """The starting vector has a certified rational slope (discrete orbit)."""


class ParseError(FqError, ValueError):
    pass


class RationalSlopeFallback(UserWarning):
    """The two linear forms were exchanged because the first has rational slope."""
