"""Exception hierarchy shared by the whole package."""


class TnnStableError(Exception):
    """Base class for all library errors."""


class DimensionError(TnnStableError, ValueError):
    """Operands have incompatible sizes or variable counts."""


class DomainError(TnnStableError, ValueError):
    """Input lies outside the domain of the operation (e.g. complex where real is needed)."""


class PreconditionError(TnnStableError, ValueError):
    """A documented precondition of an operation does not hold."""


class UnsupportedDegreeError(TnnStableError, ValueError):
    """A sparse polynomial exponent would exceed the supported cap."""


class SizeCapError(TnnStableError, ValueError):
    """Problem size exceeds a hard or configured cap."""


class NotAPointError(TnnStableError, ValueError):
    """A matrix does not have full column rank, so it defines no Grassmannian point."""


class SingularMatrixError(TnnStableError, ValueError):
    """A matrix that must be invertible is singular."""


class GenerationError(TnnStableError, RuntimeError):
    """Random generation failed to produce a verified object."""


class FormatError(TnnStableError, ValueError):
    """Malformed input document."""
