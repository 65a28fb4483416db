"""Exception hierarchy. Each family maps to a CLI exit code."""

from __future__ import annotations


class CcaError(Exception):
    exit_code = 1


class ValidationError(CcaError, ValueError):
    """Bad input values, configuration documents or arguments."""

    exit_code = 2


class ConfigError(ValidationError):
    pass


class DomainError(ValidationError):
    pass


class DataError(CcaError):
    """Malformed or incomplete measurement data."""

    exit_code = 3


class LoadError(DataError):
    def __init__(self, message: str, row: int | None = None):
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row


class NumericalError(CcaError, ArithmeticError):
    exit_code = 4


class SingularFitError(NumericalError):
    pass


class DivergenceError(NumericalError):
    pass


class UnknownFrequencyError(DomainError, LookupError):
    pass
