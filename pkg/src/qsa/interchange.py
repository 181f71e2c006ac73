"""JSON-friendly dict representations of models and engine results.

This is the one wire shape used by the HTTP service, the CLI's JSON output,
and any client that wants to rebuild the graph: ``model_from_doc`` inverts
``model_to_doc`` exactly.  Scores travel as canonical decimal strings so
no reader is forced through binary floating point.
"""

from __future__ import annotations

from typing import Any, Mapping

from .engine import (
    Recommendation,
    Selection,
    WhatIfReport,
    format_score,
)
from .model import (
    Branch,
    DecisionModel,
    DesignArea,
    Gateway,
    GatewayKind,
    ModelMeta,
    Pattern,
    QualityImpact,
    Direction,
)


def gateway_to_doc(gateway: Gateway) -> dict[str, Any]:
    return {
        "id": gateway.id,
        "kind": gateway.kind.value,
        "question": gateway.question,
        "branches": [
            {"label": b.label, "condition": b.condition, "target": b.target}
            for b in gateway.branches
        ],
    }


def pattern_to_doc(pattern: Pattern) -> dict[str, Any]:
    return {
        "id": pattern.id,
        "name": pattern.name,
        "summary": pattern.summary,
        "improves": list(pattern.improves()),
        "degrades": list(pattern.degrades()),
        "constraints": list(pattern.constraints),
        "complements": list(pattern.complements),
        "next": pattern.next,
        "refs": list(pattern.refs),
        "canonical": list(pattern.canonical) if pattern.canonical else None,
    }


def model_to_doc(model: DecisionModel) -> dict[str, Any]:
    return {
        "area": model.area.value,
        "title": model.meta.title,
        "version": model.meta.version,
        "sources": list(model.meta.sources),
        "start": model.start,
        "gateways": [
            gateway_to_doc(gw) for gw in sorted(model.gateways, key=lambda g: g.id)
        ],
        "patterns": [
            pattern_to_doc(pat) for pat in sorted(model.patterns, key=lambda p: p.id)
        ],
    }


def model_from_doc(doc: Mapping[str, Any]) -> DecisionModel:
    """Rebuild a model from its document form; raises ValueError when off."""
    try:
        gateways = tuple(
            Gateway(
                id=gw["id"],
                kind=GatewayKind(gw["kind"]),
                question=gw["question"],
                branches=tuple(
                    Branch(b["label"], b["condition"], b["target"])
                    for b in gw["branches"]
                ),
            )
            for gw in doc["gateways"]
        )
        patterns = tuple(
            Pattern(
                id=pat["id"],
                name=pat["name"],
                impacts=tuple(
                    [QualityImpact(a, Direction.IMPROVES) for a in pat["improves"]]
                    + [QualityImpact(a, Direction.DEGRADES) for a in pat["degrades"]]
                ),
                summary=pat.get("summary", ""),
                constraints=tuple(pat.get("constraints", ())),
                complements=tuple(pat.get("complements", ())),
                next=pat.get("next"),
                refs=tuple(pat.get("refs", ())),
                canonical=(
                    tuple(pat["canonical"]) if pat.get("canonical") else None
                ),
            )
            for pat in doc["patterns"]
        )
        return DecisionModel(
            area=DesignArea.from_id(doc["area"]),
            start=doc["start"],
            gateways=gateways,
            patterns=patterns,
            meta=ModelMeta(
                title=doc.get("title", ""),
                version=doc.get("version", "1"),
                sources=tuple(doc.get("sources", ())),
            ),
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed model document: {exc}") from exc


def recommendation_to_doc(rec: Recommendation) -> dict[str, Any]:
    return {
        "pattern": rec.pattern,
        "name": rec.name,
        "summary": rec.summary,
        "score": format_score(rec.score),
        "improves": list(rec.improves),
        "degrades": list(rec.degrades),
        "constraints": list(rec.constraints),
        "complements": list(rec.complements),
        "path": list(rec.path),
    }


def selection_to_doc(selection: Selection) -> dict[str, Any]:
    return {
        "answers": {g: list(labels) for g, labels in sorted(selection.answers.items())},
        "patterns": list(selection.patterns),
        "total_score": format_score(selection.total_score),
    }


def whatif_to_doc(report: WhatIfReport) -> dict[str, Any]:
    return {
        "score_deltas": [
            {
                "pattern": d.pattern,
                "score_a": format_score(d.score_a),
                "score_b": format_score(d.score_b),
                "delta": format_score(d.delta),
            }
            for d in report.score_deltas
        ],
        "rank_moves": [
            {"pattern": m.pattern, "rank_a": m.rank_a, "rank_b": m.rank_b}
            for m in report.rank_moves
        ],
        "flipped_pairs": [list(pair) for pair in report.flipped_pairs],
    }
