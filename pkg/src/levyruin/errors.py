"""Exception hierarchy shared across the package."""


class LevyRuinError(Exception):
    """Base class for all package errors."""


class DomainError(LevyRuinError, ValueError):
    """An argument is outside the mathematical domain of the operation."""


class RegimeError(LevyRuinError, RuntimeError):
    """The operation is undefined for the model's tail regime."""


class AccuracyError(LevyRuinError, RuntimeError):
    """A numerical routine failed to reach the requested tolerance.

    Carries the best available estimate and an error bound so callers can
    decide whether the partial result is still usable.
    """

    def __init__(self, message, estimate=None, error_bound=None):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound


class EstimationError(LevyRuinError, RuntimeError):
    """A Monte Carlo estimate could not be formed within the path budget."""
