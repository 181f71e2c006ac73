"""Graphviz DOT rendering of a decision model.

The layout mirrors the notation the models are drawn in: gateways are
diamonds tagged with their kind ([XOR] exactly one, [OR] one or more,
[AND] all), patterns are rounded boxes listing one ``+qa``/``-qa`` line
per impact, constraints hang off their pattern as octagons, and
complement links are drawn once as a double-headed dashed edge.  Output
is deterministic: nodes are emitted in id order and edges in a fixed
grouping, so two renders of the same model are byte-identical.
"""

from __future__ import annotations

from .model import DecisionModel, GatewayKind

__all__ = ["model_to_dot"]

_KIND_TAGS = {
    GatewayKind.EXCLUSIVE: "[XOR]",
    GatewayKind.INCLUSIVE: "[OR]",
    GatewayKind.PARALLEL: "[AND]",
}


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def _label(lines: list[str]) -> str:
    return '"' + "\\n".join(_escape(line) for line in lines) + '"'


def _quoted(name: str) -> str:
    return f'"{_escape(name)}"'


def model_to_dot(model: DecisionModel) -> str:
    out: list[str] = []
    out.append(f"digraph {_quoted(model.area.value)} {{")
    out.append('  graph [rankdir=LR, fontname="Helvetica"];')
    out.append('  node [fontname="Helvetica"];')
    out.append('  edge [fontname="Helvetica"];')
    out.append("  __start [shape=point, width=0.15];")

    gateway_map = model.gateway_map
    pattern_map = model.pattern_map
    for node_id in sorted(gateway_map | pattern_map):
        gw = gateway_map.get(node_id)
        if gw is not None:
            lines = [f"{_KIND_TAGS[gw.kind]} {gw.id}", gw.question]
            out.append(f"  {_quoted(gw.id)} [shape=diamond, label={_label(lines)}];")
        else:
            pat = pattern_map[node_id]
            lines = [pat.name]
            lines.extend(f"+{qa}" for qa in pat.improves())
            lines.extend(f"-{qa}" for qa in pat.degrades())
            out.append(
                f"  {_quoted(pat.id)} [shape=box, style=rounded, label={_label(lines)}];"
            )
    for pat_id in sorted(pattern_map):
        for index, text in enumerate(pattern_map[pat_id].constraints):
            name = f"{pat_id}:c{index}"
            out.append(f"  {_quoted(name)} [shape=octagon, label={_label([text])}];")

    out.append(f"  __start -> {_quoted(model.start)};")
    for node_id in sorted(gateway_map | pattern_map):
        gw = gateway_map.get(node_id)
        if gw is not None:
            for branch in gw.branches:
                label = _label([f"{branch.label}: {branch.condition}"])
                out.append(
                    f"  {_quoted(gw.id)} -> {_quoted(branch.target)} [label={label}];"
                )
        else:
            pat = pattern_map[node_id]
            if pat.next is not None:
                out.append(f"  {_quoted(pat.id)} -> {_quoted(pat.next)};")
    for pat_id in sorted(pattern_map):
        for index in range(len(pattern_map[pat_id].constraints)):
            name = f"{pat_id}:c{index}"
            out.append(
                f"  {_quoted(pat_id)} -> {_quoted(name)} "
                "[style=dashed, arrowhead=none];"
            )
    seen: set[tuple[str, str]] = set()
    for pat_id in sorted(pattern_map):
        for other in pattern_map[pat_id].complements:
            pair = tuple(sorted((pat_id, other)))
            if other in pattern_map and pair not in seen:
                seen.add(pair)
                out.append(
                    f"  {_quoted(pair[0])} -> {_quoted(pair[1])} "
                    "[dir=both, style=dashed];"
                )
    out.append("}")
    return "\n".join(out) + "\n"
