"""Exception hierarchy shared by all lab modules."""

from __future__ import annotations


class LabError(Exception):
    """Base class for every error raised by berezin_lab."""


class DomainError(LabError, ValueError):
    pass


class ToleranceNotReached(LabError):
    """Adaptive quadrature ran out of its subdivision budget."""

    def __init__(self, message: str, value: complex | None = None, error_estimate: float | None = None):
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate


class NonFiniteIntegrand(LabError, ArithmeticError):
    pass


class RadiusOutOfRange(LabError, ValueError):
    pass


class UnsupportedVariant(LabError):
    """Raised when an operation has no meaning for a symbol variant.

    For the oscillating symbol the essential range is a circle; ``circle``
    then holds ``(center, radius)`` so callers can still use it.
    """

    def __init__(self, message: str, circle: tuple[complex, float] | None = None):
        super().__init__(message)
        self.circle = circle


class EmptyPartition(LabError):
    pass


class ScheduleTooShort(LabError, ValueError):
    pass


class OrderingViolation(LabError):
    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class NotExtremePoint(LabError, ValueError):
    pass


class CacheCorrupt(LabError):
    pass


class ParseError(LabError, ValueError):
    def __init__(self, message: str, field: str | None = None):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field


class ValidationError(LabError, ValueError):
    pass
