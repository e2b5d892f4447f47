"""
Error hierarchy for the biphoton toolkit.

ValidationError covers bad inputs (CLI exit code 2), NumericalError covers
solvers and fits that cannot produce an answer (CLI exit code 3).
"""

from typing import Optional


class BiphotonError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(BiphotonError, ValueError):
    """Input violates a documented precondition."""


class InvalidArgumentError(ValidationError):
    pass


class InvalidStateError(ValidationError):
    """A density matrix or state is not in the form an operation requires."""


class InvalidInputError(ValidationError):
    pass


class InvalidFitError(ValidationError):
    pass


class RangeError(ValidationError):
    """Query outside the tabulated range."""


class RegimeError(ValidationError):
    """Formula applied outside its physical regime."""


class UndefinedVisibilityError(ValidationError):
    pass


class SpectrumParseError(ValidationError):
    """Malformed row in a numeric CSV document."""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class NumericalError(BiphotonError, ArithmeticError):
    """A numerical procedure failed to produce a result."""


class IdentifiabilityError(NumericalError):
    pass


class BracketingError(NumericalError):
    pass


class OutOfRangeError(NumericalError):
    """No fixed point inside the tabulated wavelength range."""


class SingularityError(NumericalError):
    """eps_m + eps_d vanishes where the solution would lie."""


class NoModeError(NumericalError):
    pass
