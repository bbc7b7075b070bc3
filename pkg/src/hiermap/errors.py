"""Exception types shared across the package."""


class HiermapError(Exception):
    """Base class for all package-specific errors."""


class DomainError(HiermapError, ValueError):
    """A hyperparameter (or index) lies outside its admissible domain."""


class UnsupportedParameterError(HiermapError, ValueError):
    """A parameter value outside the implemented closed-form cases."""


class EvaluationError(HiermapError, RuntimeError):
    """An objective returned a non-finite value during minimization.

    Carries the offending point in ``theta``.
    """

    def __init__(self, message, theta=None):
        super().__init__(message)
        self.theta = theta


class NumericalError(HiermapError, RuntimeError):
    """A numerical routine failed beyond recovery (e.g. factorization)."""


class ConfigError(HiermapError, ValueError):
    """A run configuration is malformed or inconsistent."""
