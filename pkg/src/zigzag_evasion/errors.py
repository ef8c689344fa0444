"""Exception types raised across the package."""


class EvasionError(Exception):
    """Base class for all package errors."""


class DomainError(EvasionError, ValueError):
    """An argument lies outside the domain of an operation."""


class ScenarioValidationError(EvasionError, ValueError):
    """A scenario file or object violates its schema or invariants."""

    def __init__(self, message, field=None):
        super().__init__(message if field is None else f"{field}: {message}")
        self.field = field


class NonGenericScenario(EvasionError):
    """A nerve predicate is tangent (MARGINAL) where the pipeline needs a decision."""

    def __init__(self, message, simplex=None, interval=None):
        super().__init__(message)
        self.simplex = simplex
        self.interval = interval


class ClearanceTooSmall(EvasionError):
    """The grid is too coarse for the free region at some time."""

    def __init__(self, message, clearance=None, required=None, time=None):
        super().__init__(message)
        self.clearance = clearance
        self.required = required
        self.time = time


class IsoAssumptionViolated(EvasionError):
    """A span leg that should be a bijection (or isomorphism) is not."""

    def __init__(self, message, span=None):
        super().__init__(message)
        self.span = span


class DualityMismatch(EvasionError):
    """The covered-side homology route disagrees with the free-side route."""


class ResourceBudgetExceeded(EvasionError):
    """An enumeration would exceed its configured budget."""
