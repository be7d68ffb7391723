"""Exception types raised across the package."""


class WeylTropError(Exception):
    """Base class for all package errors."""


class DivisionByZero(WeylTropError, ZeroDivisionError):
    pass


class PoleAtPoint(WeylTropError, ZeroDivisionError):
    pass


class NonClearedExponent(WeylTropError, ValueError):
    pass


class DegenerateSpecialization(WeylTropError):
    pass


class NotSubtractionFree(WeylTropError, ValueError):
    pass


class IndexOutOfRange(WeylTropError, IndexError):
    pass


class ShapeMismatch(WeylTropError, ValueError):
    pass


class NotAffine(WeylTropError, ValueError):
    pass


class HalfIntegerResult(WeylTropError, ValueError):
    pass


class AssumptionViolated(WeylTropError, ValueError):
    """The index fails k[n-1]*k[n+1] == l[n-1]*l[n+1]."""


class NotZetaExpressible(WeylTropError):
    pass


class NonMonomialCoefficient(WeylTropError, ValueError):
    pass


class NonIntegralSolution(WeylTropError, ValueError):
    pass


class NonConvergent(WeylTropError, ValueError):
    pass


class BadShape(WeylTropError, ValueError):
    pass


class DegenerateScale(WeylTropError, ArithmeticError):
    pass


class UnknownGenerator(WeylTropError, ValueError):
    pass
