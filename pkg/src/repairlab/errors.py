"""Exception hierarchy shared by every repairlab module."""

from __future__ import annotations

from dataclasses import dataclass


class RepairLabError(Exception):
    """Base class for all library errors."""


class SchemaError(RepairLabError, ValueError):
    """A schema, constraint or fact does not agree with its declared schema."""


class SortError(RepairLabError, TypeError):
    """An order comparison was applied to symbolic values."""


class UnsupportedClassError(RepairLabError):
    """No polynomial engine applies to the given constraint class / query shape."""


class OverCapError(RepairLabError):
    """The brute-force oracle was asked to work on an instance above its size cap."""


class UnguardedVariableError(RepairLabError, ValueError):
    """A quantified variable has no positive relational atom to range over."""


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    col_start: int
    col_end: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.col_start}-{self.col_end}"


class ParseError(RepairLabError, ValueError):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(f"{span}: {message}")
        self.message = message
        self.span = span
