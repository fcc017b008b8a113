"""Exception types shared across the package."""


class BrodyLabError(Exception):
    """Base class for all package errors."""


class InvalidPointError(BrodyLabError, ValueError):
    """Homogeneous coordinates that are all zero (or malformed)."""


class DivergentSumError(BrodyLabError, ValueError):
    """Lattice sum with exponent s <= 2."""


class ChartError(BrodyLabError):
    """An affine chart hits a zero of its denominator coordinate."""


class PoleProximityError(BrodyLabError):
    """Evaluation in the plain affine lift too close to a pole."""


class AmbiguousNearestPointError(BrodyLabError):
    """The nearest lattice point is not unique."""


class QuadratureError(BrodyLabError):
    """Quadrature did not converge; ``estimate`` holds the last value."""

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class CoverError(BrodyLabError, ValueError):
    """A box family that does not cover the cube."""


class SearchGuardError(BrodyLabError):
    """Exhaustive search would exceed the node budget."""
