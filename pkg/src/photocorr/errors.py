"""Exception types shared across the package."""


class PhotocorrError(Exception):
    """Base class for all package errors."""


class ValidationError(PhotocorrError, ValueError):
    """A parameter is outside its documented domain."""


class TailToleranceError(PhotocorrError):
    """A truncated distribution cannot meet the requested tail tolerance."""

    def __init__(self, message, required_cutoff=None):
        super().__init__(message)
        self.required_cutoff = required_cutoff


class DataError(PhotocorrError):
    """Input data is malformed or insufficient for the requested estimate."""


class UndefinedMarkerError(DataError):
    """A marker is undefined for the given input (e.g. zero variance)."""


class NoiseDominatedError(DataError):
    """Instrument noise exceeds the measured variance; correction impossible."""


class InconsistentDataError(DataError):
    """Measured values admit no solution under the assumed model."""
