"""Exception hierarchy shared by all modules."""

from typing import Optional


class SlrError(Exception):
    """Base class for recovery errors."""


class DimensionError(SlrError, ValueError):
    """Grid, channel, filter or vector sizes do not agree."""


class ParameterError(SlrError, ValueError):
    """A parameter is outside its valid range."""


class ConfigError(SlrError, ValueError):
    """A spec or run file failed validation."""


class NumericalError(SlrError, ArithmeticError):
    """Numerical breakdown (non-Hermitian input, non-finite iterate)."""

    def __init__(self, message: str, iteration: Optional[int] = None):
        super().__init__(message)
        self.iteration = iteration


class FormatError(SlrError, ValueError):
    """An array file is malformed."""

    def __init__(self, message: str, path: Optional[str] = None):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
