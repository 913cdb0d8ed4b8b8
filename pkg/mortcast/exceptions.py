"""Custom exceptions for mortcast.

Every failure the library reports is a `MortcastError`. Subclasses exist per
failure kind so callers can catch narrowly (e.g. the backtest catches
fit failures and keeps going) while the CLI maps the whole family to exit
code 2.
"""


class MortcastError(Exception):
    """Raised when a domain rule is violated.

    Attributes:
        errors: List of error messages (blocking issues)
        warnings: List of warning messages (non-blocking)
        code: Stable identifier of the failure kind

    Examples:
        >>> raise MortcastError(["Surface has no years"])
        >>> raise DegenerateSurface(
        ...     errors=["Need at least 3 years, got 2"],
        ...     warnings=["Ages 100+ aggregated without counts"]
        ... )
    """

    code = "MortcastError"

    def __init__(self, errors: list[str], warnings: list[str] = None):
        if isinstance(errors, str):
            errors = [errors]
        self.errors = errors
        self.warnings = warnings or []
        super().__init__("; ".join(errors))


# Data ingestion


class MalformedRow(MortcastError):
    code = "MalformedRow"


class EmptyInput(MortcastError):
    code = "EmptyInput"


class InconsistentYears(MortcastError):
    code = "InconsistentYears"


class GridMismatch(MortcastError):
    code = "GridMismatch"


class NoYearsAfterStart(MortcastError):
    code = "NoYearsAfterStart"


class TopOutOfRange(MortcastError):
    code = "TopOutOfRange"


class RangeOutOfBounds(MortcastError):
    code = "RangeOutOfBounds"


class UnrepairableColumn(MortcastError):
    code = "UnrepairableColumn"


# Model fitting


class MissingCounts(MortcastError):
    code = "MissingCounts"


class DegenerateSurface(MortcastError):
    code = "DegenerateSurface"


class NonFiniteObjective(MortcastError):
    code = "NonFiniteObjective"


# Forecasting


class TooShort(MortcastError):
    code = "TooShort"


class NotConverged(MortcastError):
    code = "NotConverged"


class BadDims(MortcastError):
    code = "BadDims"


# Evaluation


class DimMismatch(MortcastError):
    code = "DimMismatch"


class ZeroActual(MortcastError):
    code = "ZeroActual"


class InvertedBounds(MortcastError):
    code = "InvertedBounds"


# Experiment / reporting


class MissingData(MortcastError):
    code = "MissingData"


class ConfigInvalid(MortcastError):
    code = "ConfigInvalid"


class IncompleteGrid(MortcastError):
    code = "IncompleteGrid"


class IoError(MortcastError):
    code = "IoError"


class BadTruth(MortcastError):
    code = "BadTruth"
