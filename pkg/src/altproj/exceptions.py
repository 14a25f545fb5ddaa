"""Exception types shared across the package."""

__all__ = [
    "AltprojError",
    "InvalidInputError",
    "RankDeficiencyError",
    "NumericalFailureError",
    "DegenerateTraceError",
    "InsufficientDataError",
    "ConfigError",
]


class AltprojError(Exception):
    """Base class for every library-specific error."""


class InvalidInputError(AltprojError, ValueError):
    """An argument violates a documented precondition."""


class RankDeficiencyError(InvalidInputError):
    """A matrix that must have full numerical rank does not."""


class NumericalFailureError(AltprojError, RuntimeError):
    """An iteration produced a non-finite value.

    The attribute ``iteration`` holds the index of the offending step when
    known, otherwise ``None``.
    """

    def __init__(self, message, iteration=None):
        super().__init__(message)
        self.iteration = iteration


class DegenerateTraceError(AltprojError):
    """A trace carries no usable step information (started at the solution)."""


class InsufficientDataError(AltprojError):
    """A trace is too short, or lacks the fields, for the requested estimate."""


class ConfigError(AltprojError, ValueError):
    """A run configuration or trace file is missing keys or malformed."""
