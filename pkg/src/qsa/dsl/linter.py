"""Style checks layered on top of parsing.

``lint`` returns everything ``parse`` reports plus, for documents that
parse cleanly, warnings for patterns without provenance references and for
documents that differ from their canonical rendering.
"""

from __future__ import annotations

from ..vocabulary import BUILTIN_VOCABULARY, Vocabulary
from .diagnostics import Diagnostic, DiagnosticSeverity, SourceSpan
from .parser import parse
from .serializer import serialize

_DOC_START = SourceSpan(1, 1, 1, 1)


def lint(
    source: str | bytes, vocabulary: Vocabulary = BUILTIN_VOCABULARY
) -> tuple[Diagnostic, ...]:
    result = parse(source, vocabulary)
    findings = list(result.diagnostics)
    if result.model is None:
        return tuple(findings)

    for pat in result.model.patterns:
        if not pat.refs:
            findings.append(
                Diagnostic(
                    DiagnosticSeverity.WARNING,
                    "missing-provenance",
                    f"pattern {pat.id!r} cites no source reference",
                    result.node_spans.get(pat.id, _DOC_START),
                )
            )

    text = source.decode("utf-8", errors="replace") if isinstance(source, bytes) else source
    if text != serialize(result.model):
        findings.append(
            Diagnostic(
                DiagnosticSeverity.WARNING,
                "non-canonical",
                "document differs from its canonical rendering",
                _DOC_START,
            )
        )
    findings.sort(key=lambda d: (d.span.line, d.span.col, d.code, d.message))
    return tuple(findings)
