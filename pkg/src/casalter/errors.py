"""Exception types raised across the package."""


class CasalterError(Exception):
    """Base class for all package errors."""


class InvalidInputError(CasalterError, ValueError):
    """An argument violates a documented precondition."""


class DegenerateInputError(InvalidInputError):
    """The input makes a derived quantity undefined (e.g. a vanishing trace)."""


class SingularDenominatorError(CasalterError, ArithmeticError):
    """A reflection-coefficient denominator underflowed."""


class ConvergenceError(CasalterError, RuntimeError):
    """An iterative or truncated summation did not reach its tolerance.

    The partial result is attached as ``diagnostics`` so callers can inspect
    how far the summation got.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics
