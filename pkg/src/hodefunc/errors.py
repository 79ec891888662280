"""Exception types shared by the pipeline stages."""

from __future__ import annotations


class HodefuncError(Exception):
    """Base class for every error raised by this package."""


class ParseError(HodefuncError):
    def __init__(self, line: int, column: int, expected: str, found: str):
        self.line = line
        self.column = column
        self.expected = expected
        self.found = found
        super().__init__(f"{line}:{column}: expected {expected}, found {found}")


class DuplicateEquation(HodefuncError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"relation {name!r} has more than one equation")


class SortError(HodefuncError):
    """A violation of the sorting rules.

    ``kind`` is one of the class constants below and ``symbol`` names the
    offending variable, relation or operator.
    """

    UNBOUND = "Unbound"
    MISMATCH = "Mismatch"
    NON_RELATIONAL_TOP_VAR = "NonRelationalTopVar"
    CONFLICTING_ENV = "ConflictingEnv"
    ILL_FORMED_CONSTRAINT = "IllFormedConstraint"

    def __init__(self, kind: str, symbol: str, details: str = "", location=None, equation: str | None = None):
        self.kind = kind
        self.symbol = symbol
        self.details = details
        self.location = location
        self.equation = equation
        super().__init__(self._message())

    def _message(self) -> str:
        where = ""
        if self.location is not None:
            where = f"{self.location.line}:{self.location.column}: "
        eq = f" in equation for {self.equation}" if self.equation else ""
        extra = f": {self.details}" if self.details else ""
        return f"{where}{self.kind} ({self.symbol}){eq}{extra}"

    def in_equation(self, name: str) -> "SortError":
        self.equation = name
        self.args = (self._message(),)
        return self


class CaptureRisk(HodefuncError):
    pass


class ArityMismatch(HodefuncError):
    pass


class InternalError(HodefuncError):
    """A stage received input violating its documented precondition."""


class NonFirstOrder(HodefuncError):
    pass


class Explosion(HodefuncError):
    """A finite enumeration exceeded the configured size cap."""


class SortMismatch(HodefuncError):
    """A semantic value was applied to an argument outside its domain."""
