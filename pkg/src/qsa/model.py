"""Core decision-model types and structural validation.

A decision model is a directed acyclic graph rooted at a start node.  Nodes
are either gateways (questions with labelled branches) or patterns
(selectable architecture patterns/strategies with quality impacts).  Edges
are gateway branches plus optional per-pattern conditional-flow ``next``
links.  Gateway kinds follow workflow-notation semantics:

* ``inclusive``  - one or more branches may be chosen
* ``exclusive``  - exactly one branch is chosen
* ``parallel``   - all branches activate, no answer is taken
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator

from .errors import UnvalidatedModelError
from .vocabulary import BUILTIN_VOCABULARY, Vocabulary


class DesignArea(enum.Enum):
    """The six architectural design areas covered by the catalog."""

    COMMUNICATION = "communication"
    DECOMPOSITION = "decomposition"
    DATA_PROCESSING = "data-processing"
    FAULT_TOLERANCE = "fault-tolerance"
    INTEGRATION_OPTIMIZATION = "integration-optimization"
    ALGORITHM_IMPLEMENTATION = "algorithm-implementation"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def from_id(cls, area_id: str) -> "DesignArea":
        for area in cls:
            if area.value == area_id:
                return area
        raise ValueError(f"unknown design area {area_id!r}")


class GatewayKind(enum.Enum):
    INCLUSIVE = "inclusive"
    EXCLUSIVE = "exclusive"
    PARALLEL = "parallel"

    def __str__(self) -> str:
        return self.value


class Direction(enum.Enum):
    IMPROVES = "improves"
    DEGRADES = "degrades"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class QualityImpact:
    """A signed effect of a pattern on one quality attribute."""

    attribute: str
    direction: Direction

    @property
    def sign(self) -> int:
        return 1 if self.direction is Direction.IMPROVES else -1


@dataclass(frozen=True)
class Branch:
    """One labelled outgoing edge of a gateway."""

    label: str
    condition: str
    target: str


@dataclass(frozen=True)
class Gateway:
    id: str
    kind: GatewayKind
    question: str
    branches: tuple[Branch, ...]

    def branch(self, label: str) -> Branch | None:
        for b in self.branches:
            if b.label == label:
                return b
        return None


@dataclass(frozen=True)
class Pattern:
    """A selectable architecture pattern or strategy."""

    id: str
    name: str
    impacts: tuple[QualityImpact, ...] = ()
    summary: str = ""
    constraints: tuple[str, ...] = ()
    complements: tuple[str, ...] = ()
    next: str | None = None
    refs: tuple[str, ...] = ()
    #: For a pattern that also appears in another area's model, the
    #: (area id, pattern id) of its canonical occurrence.
    canonical: tuple[str, str] | None = None

    def improves(self) -> tuple[str, ...]:
        return tuple(
            i.attribute for i in self.impacts if i.direction is Direction.IMPROVES
        )

    def degrades(self) -> tuple[str, ...]:
        return tuple(
            i.attribute for i in self.impacts if i.direction is Direction.DEGRADES
        )


@dataclass(frozen=True)
class ModelMeta:
    title: str = ""
    version: str = "1"
    sources: tuple[str, ...] = ()


@dataclass(frozen=True)
class DecisionModel:
    """A complete decision model for one design area.

    ``gateways`` and ``patterns`` are stored as tuples so that malformed
    inputs (duplicate ids) can still be represented and reported by
    :func:`validate_model` instead of blowing up at construction time.
    """

    area: DesignArea
    start: str
    gateways: tuple[Gateway, ...] = ()
    patterns: tuple[Pattern, ...] = ()
    meta: ModelMeta = ModelMeta()

    @cached_property
    def gateway_map(self) -> dict[str, Gateway]:
        return {g.id: g for g in self.gateways}

    @cached_property
    def pattern_map(self) -> dict[str, Pattern]:
        return {p.id: p for p in self.patterns}

    def node_ids(self) -> set[str]:
        return {g.id for g in self.gateways} | {p.id for p in self.patterns}

    def edges_from(self, node_id: str) -> tuple[str, ...]:
        """Outgoing edge targets of a node, in declaration order."""
        gw = self.gateway_map.get(node_id)
        if gw is not None:
            return tuple(b.target for b in gw.branches)
        pat = self.pattern_map.get(node_id)
        if pat is not None and pat.next is not None:
            return (pat.next,)
        return ()


class Severity(enum.Enum):
    ERROR = "error"
    WARNING = "warning"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Finding:
    severity: Severity
    code: str
    message: str
    node: str | None = None


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...]

    @property
    def ok(self) -> bool:
        return not any(f.severity is Severity.ERROR for f in self.findings)

    def errors(self) -> tuple[Finding, ...]:
        return tuple(f for f in self.findings if f.severity is Severity.ERROR)

    def warnings(self) -> tuple[Finding, ...]:
        return tuple(f for f in self.findings if f.severity is Severity.WARNING)

    def codes(self) -> set[str]:
        return {f.code for f in self.findings}

    def render(self) -> str:
        """Stable one-line-per-finding plain text rendering."""
        lines = []
        for f in self.findings:
            where = f" at {f.node}" if f.node else ""
            lines.append(f"{f.severity.value}: {f.code}{where}: {f.message}")
        return "\n".join(lines)


#: Error codes that make graph traversal or session arithmetic unsound.
#: Operations that walk the graph refuse models carrying any of these;
#: content-level findings (unknown attributes, conflicting impacts,
#: unreachable nodes) do not block traversal.
STRUCTURAL_CODES = frozenset(
    {
        "duplicate-id",
        "missing-start",
        "dangling-target",
        "cycle",
        "exclusive-needs-two",
        "gateway-needs-branch",
        "duplicate-branch-label",
    }
)


def validate_model(
    model: DecisionModel, vocabulary: Vocabulary = BUILTIN_VOCABULARY
) -> ValidationReport:
    """Check every structural and content rule; never raises on bad input.

    Findings are sorted by (node id, code, message) so identical inputs
    always produce identical reports.
    """
    findings: list[Finding] = []

    def error(code: str, node: str | None, message: str) -> None:
        findings.append(Finding(Severity.ERROR, code, message, node))

    def warning(code: str, node: str | None, message: str) -> None:
        findings.append(Finding(Severity.WARNING, code, message, node))

    seen: set[str] = set()
    for node_id in [g.id for g in model.gateways] + [p.id for p in model.patterns]:
        if node_id in seen:
            error("duplicate-id", node_id, f"node id {node_id!r} is defined more than once")
        seen.add(node_id)
    node_ids = seen

    if model.start not in node_ids:
        error("missing-start", None, f"start node {model.start!r} does not exist")

    for gw in model.gateways:
        if not gw.branches:
            error("gateway-needs-branch", gw.id, "gateway has no branches")
        if gw.kind is GatewayKind.EXCLUSIVE and len(gw.branches) < 2:
            error(
                "exclusive-needs-two",
                gw.id,
                "exclusive gateway needs at least two branches",
            )
        labels: set[str] = set()
        for br in gw.branches:
            if br.label in labels:
                error(
                    "duplicate-branch-label",
                    gw.id,
                    f"branch label {br.label!r} appears more than once",
                )
            labels.add(br.label)
            if br.target not in node_ids:
                error(
                    "dangling-target",
                    gw.id,
                    f"branch {br.label!r} targets unknown node {br.target!r}",
                )

    pattern_ids = {p.id for p in model.patterns}
    for pat in model.patterns:
        if pat.next is not None and pat.next not in node_ids:
            error(
                "dangling-target",
                pat.id,
                f"conditional flow targets unknown node {pat.next!r}",
            )
        for ref in pat.complements:
            if ref not in pattern_ids:
                error(
                    "dangling-complement",
                    pat.id,
                    f"complement {ref!r} is not a pattern in this model",
                )
            elif pat.id not in model.pattern_map[ref].complements:
                warning(
                    "asymmetric-complements",
                    pat.id,
                    f"{pat.id!r} complements {ref!r} but not vice versa",
                )
        seen_impacts: set[QualityImpact] = set()
        improved = {i.attribute for i in pat.impacts if i.direction is Direction.IMPROVES}
        degraded = {i.attribute for i in pat.impacts if i.direction is Direction.DEGRADES}
        for imp in pat.impacts:
            if imp in seen_impacts:
                error(
                    "duplicate-impact",
                    pat.id,
                    f"impact {imp.direction.value} {imp.attribute!r} is listed twice",
                )
            seen_impacts.add(imp)
            if imp.attribute not in vocabulary:
                error(
                    "unknown-attribute",
                    pat.id,
                    f"attribute {imp.attribute!r} is not in the vocabulary",
                )
        for attr in sorted(improved & degraded):
            error(
                "conflicting-impact",
                pat.id,
                f"attribute {attr!r} is both improved and degraded",
            )

    cycle = _find_cycle(model)
    if cycle is not None:
        error("cycle", cycle[0], "cycle detected: " + " -> ".join(cycle))

    if model.start in node_ids:
        reached = _reach(model, model.start)
        for node_id in sorted(node_ids - reached):
            error("unreachable-node", node_id, "node cannot be reached from start")

    findings.sort(key=lambda f: (f.node or "", f.code, f.message))
    return ValidationReport(tuple(findings))


def _reach(model: DecisionModel, start: str) -> set[str]:
    node_ids = model.node_ids()
    reached: set[str] = set()
    stack = [start]
    while stack:
        node = stack.pop()
        if node in reached or node not in node_ids:
            continue
        reached.add(node)
        stack.extend(model.edges_from(node))
    return reached


def _find_cycle(model: DecisionModel) -> list[str] | None:
    """Return one cycle as a node-id path, or None.  Ignores dangling edges."""
    node_ids = model.node_ids()
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {n: WHITE for n in node_ids}
    parent: dict[str, str] = {}

    for root in sorted(node_ids):
        if color[root] != WHITE:
            continue
        stack: list[tuple[str, Iterator[str]]] = [(root, iter(model.edges_from(root)))]
        color[root] = GRAY
        while stack:
            node, edges = stack[-1]
            advanced = False
            for target in edges:
                if target not in node_ids:
                    continue
                if color[target] == GRAY:
                    path = [target, node]
                    cur = node
                    while cur != target:
                        cur = parent[cur]
                        path.append(cur)
                    path.reverse()
                    return path
                if color[target] == WHITE:
                    color[target] = GRAY
                    parent[target] = node
                    stack.append((target, iter(model.edges_from(target))))
                    advanced = True
                    break
            if not advanced:
                color[node] = BLACK
                stack.pop()
    return None


def ensure_traversable(model: DecisionModel) -> ValidationReport:
    """Validate and raise ``UnvalidatedModelError`` on structural errors."""
    report = validate_model(model)
    blocking = sorted(
        {f.code for f in report.errors() if f.code in STRUCTURAL_CODES}
    )
    if blocking:
        raise UnvalidatedModelError(
            f"model for {model.area} has structural errors: " + ", ".join(blocking),
            report=report,
        )
    return report


def reachable_patterns(model: DecisionModel) -> tuple[str, ...]:
    """Pattern ids reachable from the start node, sorted ascending."""
    ensure_traversable(model)
    reached = _reach(model, model.start)
    return tuple(sorted(reached & {p.id for p in model.patterns}))


@dataclass(frozen=True)
class AttributeUsage:
    improved_by: tuple[str, ...]
    degraded_by: tuple[str, ...]


def qa_usage(model: DecisionModel) -> dict[str, AttributeUsage]:
    """Map each referenced attribute to the patterns that move it.

    Covers every attribute mentioned by at least one reachable pattern;
    pattern id lists are sorted and disjoint per attribute for any model
    free of conflicting impacts.
    """
    ensure_traversable(model)
    live = set(reachable_patterns(model))
    improved: dict[str, set[str]] = {}
    degraded: dict[str, set[str]] = {}
    for pat in model.patterns:
        if pat.id not in live:
            continue
        for imp in pat.impacts:
            bucket = improved if imp.direction is Direction.IMPROVES else degraded
            bucket.setdefault(imp.attribute, set()).add(pat.id)
    usage: dict[str, AttributeUsage] = {}
    for attr in sorted(set(improved) | set(degraded)):
        usage[attr] = AttributeUsage(
            improved_by=tuple(sorted(improved.get(attr, ()))),
            degraded_by=tuple(sorted(degraded.get(attr, ()))),
        )
    return usage


def impacts_from(
    improves: Iterable[str] = (), degrades: Iterable[str] = ()
) -> tuple[QualityImpact, ...]:
    """Convenience builder used by tests and programmatic construction."""
    out = [QualityImpact(a, Direction.IMPROVES) for a in improves]
    out += [QualityImpact(a, Direction.DEGRADES) for a in degrades]
    return tuple(out)
