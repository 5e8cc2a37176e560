"""Exception hierarchy for dyncorr."""


class DyncorrError(Exception):
    """Base class for all dyncorr errors."""


class NotPositiveDefinite(DyncorrError):
    """A matrix required to be symmetric positive-definite is not."""


class DomainError(DyncorrError):
    """A scalar argument lies outside the mathematical domain of an operation."""


class ConfigError(DyncorrError):
    """A configuration value violates its invariants."""


class InvalidDataError(DyncorrError):
    """Input data is malformed (non-finite, ragged, wrong shape)."""


class ParseError(InvalidDataError):
    """A CSV cell could not be parsed; carries row/column location."""

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class RaggedRowsError(ParseError):
    """CSV rows have inconsistent column counts."""


class NonFiniteValueError(ParseError):
    """A parsed value is NaN or infinite."""


class ConstantChannelError(InvalidDataError):
    """A data column has zero variance and cannot be standardized."""


class EmptyResultError(DyncorrError):
    """A selection (burn-in/thinning) left no samples."""


class SchemaMismatchError(DyncorrError):
    """A stored trace or summary file does not match the expected schema."""
