"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class SparqlAlgebraError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(SparqlAlgebraError, ValueError):
    """Malformed dataset, pattern or DIMACS text.

    ``line`` and ``column`` are 1-based and may be ``None`` when unknown.
    """

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


class ScopeError(SparqlAlgebraError, ValueError):
    """A FILTER condition mentions variables that its pattern does not."""

    def __init__(self, report):
        self.report = report
        super().__init__(str(report))


class UnsupportedPatternError(SparqlAlgebraError, ValueError):
    """The operation is not defined for some operator present in the pattern."""


class NotWellDesignedError(SparqlAlgebraError, ValueError):
    def __init__(self, report):
        self.report = report
        super().__init__(str(report))


class UnboundVariableError(SparqlAlgebraError, KeyError):
    def __init__(self, variable):
        self.variable = variable
        super().__init__(f"variable {variable} is not bound by the mapping")

    def __str__(self) -> str:
        return self.args[0]


class DomainMismatchError(SparqlAlgebraError, ValueError):
    """The mapping's domain differs from the variables of the pattern."""


class CapExceededError(SparqlAlgebraError, ValueError):
    """A brute-force oracle was asked to go beyond its configured size cap."""
