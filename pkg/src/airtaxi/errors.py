"""Exception types raised across the pipeline."""


class AirTaxiError(Exception):
    """Base class for all package errors."""


class FormatError(AirTaxiError, ValueError):
    """Malformed input file: missing header, unknown column, empty file."""


class SpecError(AirTaxiError, ValueError):
    """Invalid synthetic-data specification or run configuration."""


class EmptyDatasetError(AirTaxiError, ValueError):
    """A cleaning or filtering step removed every row."""


class TrainingError(AirTaxiError, RuntimeError):
    """A learner produced a non-finite loss."""

    def __init__(self, message, iteration=None):
        super().__init__(message)
        self.iteration = iteration
