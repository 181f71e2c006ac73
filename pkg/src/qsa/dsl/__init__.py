"""Text format for decision models.

The format is line oriented: one statement per line, nested blocks wrapped
in braces, ``#`` comments, double-quoted strings with backslash escapes.
``parse`` is total over arbitrary bytes and reports every problem as a
diagnostic with a source span; ``serialize`` emits the canonical form that
``parse`` round-trips; ``lint`` layers style checks on top of parsing.
"""

from .diagnostics import Diagnostic, SourceSpan
from .parser import ParseResult, parse
from .serializer import serialize
from .linter import lint

__all__ = [
    "Diagnostic",
    "SourceSpan",
    "ParseResult",
    "parse",
    "serialize",
    "lint",
]
