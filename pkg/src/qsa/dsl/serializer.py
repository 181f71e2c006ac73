"""Canonical text rendering of decision models.

The canonical form is what ``parse`` round-trips: LF line endings, two-space
indentation, gateways then patterns each sorted by id, branches in
declaration order, a fixed statement order inside each block, and default
values omitted.  Serializing twice is byte-identical by construction.
"""

from __future__ import annotations

from ..model import DecisionModel, Gateway, Pattern

_STRING_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\t": "\\t", "\r": "\\r"}


def _quote(value: str) -> str:
    return '"' + "".join(_STRING_ESCAPES.get(ch, ch) for ch in value) + '"'


def _gateway_lines(gw: Gateway) -> list[str]:
    lines = [f"  gateway {gw.id} kind={gw.kind.value} question={_quote(gw.question)} {{"]
    for br in gw.branches:
        lines.append(f"    branch {br.label} when {_quote(br.condition)} -> {br.target}")
    lines.append("  }")
    return lines


def _pattern_lines(pat: Pattern) -> list[str]:
    lines = [f"  pattern {pat.id} name={_quote(pat.name)} {{"]
    if pat.summary:
        lines.append(f"    summary {_quote(pat.summary)}")
    if pat.canonical:
        lines.append(f"    canonical {pat.canonical[0]} {pat.canonical[1]}")
    improves = pat.improves()
    if improves:
        lines.append("    improves " + ", ".join(improves))
    degrades = pat.degrades()
    if degrades:
        lines.append("    degrades " + ", ".join(degrades))
    for constraint in pat.constraints:
        lines.append(f"    constraint {_quote(constraint)}")
    if pat.complements:
        lines.append("    complements " + ", ".join(pat.complements))
    if pat.next:
        lines.append(f"    next {pat.next}")
    for ref in pat.refs:
        lines.append(f"    ref {_quote(ref)}")
    lines.append("  }")
    return lines


def serialize(model: DecisionModel) -> str:
    """Render a model in canonical form, ending with a newline."""
    lines = [f"model {model.area.value} {_quote(model.meta.title)} {{"]
    if model.meta.version != "1":
        lines.append(f"  version {_quote(model.meta.version)}")
    for source in model.meta.sources:
        lines.append(f"  source {_quote(source)}")
    lines.append(f"  start -> {model.start}")
    for gw in sorted(model.gateways, key=lambda g: g.id):
        lines.append("")
        lines.extend(_gateway_lines(gw))
    for pat in sorted(model.patterns, key=lambda p: p.id):
        lines.append("")
        lines.extend(_pattern_lines(pat))
    lines.append("}")
    return "\n".join(lines) + "\n"
