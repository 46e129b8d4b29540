"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class ConeCosineError(ValueError):
    """Base class for every error raised by the library."""


class DimensionError(ConeCosineError):
    """Shapes or dimensions are incompatible."""


class DomainError(ConeCosineError):
    """An argument lies outside the region where the quantity is defined."""


class PoleError(DomainError):
    """A gamma factor is evaluated at one of its poles.

    ``index`` is the 1-based position of the offending factor and
    ``factor`` names the gamma product it belongs to.
    """

    def __init__(self, message: str, index: int | None = None, factor: str | None = None):
        super().__init__(message)
        self.index = index
        self.factor = factor


class ConditioningError(DomainError):
    """A positive-definite matrix is too close to the cone boundary."""


class RankError(DomainError):
    """A matrix that must have full column rank does not."""


class SamplingError(ConeCosineError):
    """A Monte Carlo run rejected too many samples."""
