"""Exception hierarchy shared by all modules."""


class SecureNCError(Exception):
    """Base class for every error raised by the toolkit."""


class FieldMismatchError(SecureNCError, ValueError):
    """Operands live in different finite fields."""


class DimensionError(SecureNCError, ValueError):
    """Matrix or vector shapes are incompatible."""


class SingularMatrixError(SecureNCError, ArithmeticError):
    """A matrix that must be invertible is singular."""


class GuardExceededError(SecureNCError, ValueError):
    """An exhaustive enumeration would exceed its desk-scale size guard."""


class InfeasibleError(SecureNCError):
    """No finite block length satisfies the requested security targets."""


class SearchExhaustedError(SecureNCError):
    """Precoder search ran out of budget without a passing candidate."""


class ConvergenceError(SecureNCError, ArithmeticError):
    """A numerical limit check did not behave monotonically."""
