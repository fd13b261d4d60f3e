"""
subcert Errors
Exception hierarchy shared by the library and the command line.
"""

from typing import Optional


class SubcertError(Exception):
    """Base class for every error raised by subcert."""

    exit_code = 1

    def __init__(self, message: str, kind: str = "unknown"):
        super().__init__(message)
        self.kind = kind


class InputError(SubcertError):
    """Raised when a system, symbol or parameter is malformed."""

    exit_code = 3

    def __init__(
        self,
        message: str,
        kind: str = "input",
        line: Optional[int] = None,
        column: Optional[int] = None,
        path: str = "",
    ):
        super().__init__(message, kind)
        self.line = line
        self.column = column
        self.path = path

    def location(self) -> str:
        """Human readable location of the offending input, if known."""
        if self.line is not None:
            return f"line {self.line}, column {self.column}"
        return self.path


class DimensionMismatch(InputError):
    """Operands live on phase spaces of different dimension."""

    def __init__(self, message: str, path: str = ""):
        super().__init__(message, kind="dimension", path=path)


class DegreeError(InputError):
    """A symbol or monomial has an unsupported degree."""

    def __init__(self, message: str, path: str = ""):
        super().__init__(message, kind="degree", path=path)


class HypothesisViolation(InputError):
    """A form claimed to have non-negative real part does not."""

    def __init__(self, message: str, path: str = "", min_eigenvalue: float = 0.0):
        super().__init__(message, kind="hypothesis", path=path)
        self.min_eigenvalue = min_eigenvalue


class IndexOutOfRange(InputError):
    """An operator or word index lies outside the system."""

    def __init__(self, message: str, path: str = ""):
        super().__init__(message, kind="range", path=path)


class NumericalFailure(SubcertError):
    """Eigensolver breakdown, empty interior block, coarse grid or empty sample region."""

    exit_code = 4

    def __init__(self, message: str, kind: str = "numerical"):
        super().__init__(message, kind)


class ConditionNotSatisfied(SubcertError):
    """Verdict-level failure; only raised by the command line to select its exit code."""

    exit_code = 2

    def __init__(self, message: str, kind: str = "verdict"):
        super().__init__(message, kind)
