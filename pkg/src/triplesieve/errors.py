"""Shared exception types."""


class DomainError(ValueError):
    """An argument lies outside the interval or parity a routine supports."""


class EvaluationError(ArithmeticError):
    """A numerical routine hit non-finite values or failed to converge."""


class CapacityError(RuntimeError):
    """A request exceeds the configured size limits (segment length, N cap)."""
