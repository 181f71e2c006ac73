"""Diagnostic and source-span types for the model text format."""

from __future__ import annotations

import enum
from dataclasses import dataclass


@dataclass(frozen=True)
class SourceSpan:
    """A half-open region of the source text, 1-based lines and columns.

    ``end_col`` points one past the last column on ``end_line``.
    """

    line: int
    col: int
    end_line: int
    end_col: int

    @property
    def length(self) -> int:
        """Column extent of the span; at least 1 even for multi-line spans."""
        if self.end_line == self.line:
            return max(1, self.end_col - self.col)
        return 1

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


class DiagnosticSeverity(enum.Enum):
    ERROR = "error"
    WARNING = "warning"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Diagnostic:
    severity: DiagnosticSeverity
    code: str
    message: str
    span: SourceSpan

    @property
    def is_error(self) -> bool:
        return self.severity is DiagnosticSeverity.ERROR

    def render(self) -> str:
        return f"{self.span}: {self.severity.value}: {self.code}: {self.message}"
