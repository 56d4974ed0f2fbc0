"""Semantic exceptions shared across the package."""


class CrrdError(Exception):
    """Base class for all package errors."""


class InvalidSpecError(CrrdError, ValueError):
    """Inputs violate a documented contract (domain, shape, combination)."""


class ShapeMismatchError(InvalidSpecError):
    """Alphabet sizes of two objects do not line up."""


class InfeasibleBudgetError(CrrdError):
    """No channel can meet the requested distortion budgets."""


class GuardExceededError(CrrdError):
    """An enumeration guard was tripped; the instance is too large.

    Carries the offending count and the guard value so callers can report
    them without string parsing.
    """

    def __init__(self, message: str, count: int, guard: int):
        super().__init__(message)
        self.count = count
        self.guard = guard
