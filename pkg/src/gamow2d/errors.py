"""Exception types shared across the toolkit."""


class ToolkitError(Exception):
    """Base class for all toolkit-specific errors."""


class DomainError(ToolkitError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class PreconditionError(ToolkitError, ValueError):
    """A documented precondition of the operation is violated."""


class FeasibilityError(ToolkitError, ValueError):
    """The requested configuration is geometrically infeasible."""


class RangeError(ToolkitError, ValueError):
    """A target value is outside the attainable range of an inversion."""


class InsufficientDataError(ToolkitError, ValueError):
    """A tabulated profile lacks the samples needed for the computation."""


class QuadratureError(ToolkitError, RuntimeError):
    """A quadrature failed to meet its tolerance.

    Carries the best available estimate in ``estimate``.
    """

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class ConfigError(ToolkitError, ValueError):
    """A run configuration failed schema validation."""
