"""Exception hierarchy shared by all lcrit modules."""


class LcritError(Exception):
    """Base class for lcrit errors."""


class DomainError(LcritError, ValueError):
    """Argument outside the supported domain of an operation."""


class PoleError(DomainError):
    """Evaluation requested at a pole."""


class NumericConsistencyError(LcritError, ArithmeticError):
    """A numerical self-check failed (usually a sign of precision loss)."""


class BoundaryZeroError(LcritError):
    """The function is too small somewhere on an integration contour."""


class ResolutionError(LcritError):
    """Phase tracking could not be resolved within the refinement budget."""


class NearZeroError(DomainError):
    """A denominator is numerically zero."""


class CompletenessError(LcritError):
    """A zero list is not certified complete up to the requested height."""
