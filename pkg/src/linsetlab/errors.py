"""Exception types shared across the library.

Division by zero raises the built-in ZeroDivisionError; everything else
derives from LinsetError so callers can catch library failures in one net.
"""


class LinsetError(Exception):
    """Base class for all linset-lab errors."""


class NonPrimeError(LinsetError, ValueError):
    """The characteristic p is not a prime number."""


class TooLargeError(LinsetError, ValueError):
    """A field, enumeration, or combinatorial bound exceeds the configured budget."""


class NotADivisorError(LinsetError, ValueError):
    """A subfield parameter d does not divide n."""


class ZeroScalarError(LinsetError, ValueError):
    """A scalar that must be nonzero (e.g. a twist factor) is zero."""


class ZeroPolynomialError(LinsetError, ValueError):
    """The zero polynomial was passed where a nonzero one is required."""


class EmptyIndexSetError(LinsetError, ValueError):
    """An index subset that must be non-empty is empty."""


class TooSmallError(LinsetError, ValueError):
    """The matrix order is below the minimum for the requested structure test."""


class NotMaxRankError(LinsetError, ValueError):
    """The subspace does not have maximum rank for the requested operation."""


class ZeroParameterError(LinsetError, ValueError):
    """A construction parameter that must be nonzero is zero."""


class BadExponentError(LinsetError, ValueError):
    """A Frobenius exponent violates a coprimality requirement."""


class BadParametersError(LinsetError, ValueError):
    """Construction parameters violate the documented constraints."""


class DecompositionFailedError(LinsetError, RuntimeError):
    """A decomposition that is guaranteed by construction did not verify (a bug)."""


class BadModeError(LinsetError, ValueError):
    """An unknown mode keyword was requested."""


class AmbientMismatchError(LinsetError, ValueError):
    """Operands live in different towers or ambient spaces."""


class NotEqualSetsError(LinsetError, ValueError):
    """A pair classification was requested for subspaces with different linear sets."""


class BudgetExceededError(LinsetError, ValueError):
    """A search size exceeds the configured budget and no sample mode was requested."""


class VertexNotInSetError(LinsetError, ValueError):
    """The proposed cone vertex is not a point of the linear set."""
