"""Error hierarchy shared by the library, the CLI, and the tool server.

Every class carries a stable machine ``code`` and the CLI ``exit_code``.
Concrete classes also derive from the closest builtin so callers that only
catch ``ValueError`` / ``RuntimeError`` keep working.
"""

from __future__ import annotations


class ProductivityError(Exception):
    code = "error"
    exit_code = 1


class ConfigError(ProductivityError, ValueError):
    code = "config_error"
    exit_code = 2


class ParameterError(ConfigError):
    code = "parameter_error"


class DataError(ProductivityError, ValueError):
    code = "data_error"
    exit_code = 3


class DomainError(DataError):
    code = "domain_error"

    def __init__(self, message: str, year: int | None = None) -> None:
        super().__init__(message)
        self.year = year


class InsufficientDataError(DataError):
    code = "insufficient_data"


class AlignmentError(DataError):
    code = "alignment_error"

    def __init__(self, message: str, spans: list[tuple[int, int]] | None = None) -> None:
        super().__init__(message)
        self.spans = spans or []


class LoadError(DataError):
    code = "load_error"

    def __init__(self, path: str, line: int | None, message: str) -> None:
        where = f"{path}:{line}" if line is not None else str(path)
        super().__init__(f"{where}: {message}")
        self.path = str(path)
        self.line = line


class NothingToForecastError(DataError):
    code = "nothing_to_forecast"


class GenerationError(DataError):
    code = "generation_error"


class DegeneracyError(ProductivityError, ArithmeticError):
    code = "model_degeneracy"
    exit_code = 4

    def __init__(self, message: str, year: int | None = None) -> None:
        super().__init__(message)
        self.year = year


class CalibrationFailedError(ProductivityError, RuntimeError):
    code = "calibration_failed"
    exit_code = 5


class UndefinedFitError(CalibrationFailedError):
    code = "undefined_fit"
