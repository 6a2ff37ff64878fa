from __future__ import annotations
from typing import Optional


class EFrameError(Exception):
    """Base class for every precondition failure raised by eframe_core."""


class DimensionMismatchError(EFrameError, ValueError):
    pass


class ShapeMismatchError(DimensionMismatchError):
    pass


class SingularMatrixError(EFrameError, ValueError):
    pass


class SingularInputError(SingularMatrixError):
    pass


class NotHermitianError(EFrameError, ValueError):
    pass


class NotPSDError(EFrameError, ValueError):
    pass


class NotAFrameError(EFrameError):
    pass


class ZeroDiagonalError(EFrameError, ValueError):
    pass


class NotRieszBasisError(EFrameError):
    pass


class NotOrthonormalError(EFrameError):
    pass


class BadEpsilonError(EFrameError, ValueError):
    pass


class BadSpecError(EFrameError, ValueError):
    pass


class DegenerateDrawError(EFrameError):
    pass


class ConfigError(EFrameError):
    pass


class ConfigParseError(ConfigError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class ConfigValidationError(ConfigError):
    def __init__(self, field: str, message: str, loc: Optional[tuple] = None):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.loc = loc or (field,)
