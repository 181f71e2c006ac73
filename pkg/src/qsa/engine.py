"""Recommendation engine over decision models.

A session walks a model from its start node: parallel gateways fan out
immediately, answered gateways follow their chosen branches, unanswered
ones form the frontier of open questions.  Patterns collect along the way
and are ranked by a weighted signed sum of their quality impacts.  All
arithmetic uses ``Decimal`` so equal inputs give exactly equal scores.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from typing import Iterable, Iterator, Mapping

from .errors import (
    ArityViolationError,
    NegativeWeightError,
    TooLargeToEnumerateError,
    UnknownAttributeError,
    UnknownBranchError,
    UnknownGatewayError,
)
from .model import (
    DecisionModel,
    Gateway,
    GatewayKind,
    Pattern,
    ensure_traversable,
)
from .vocabulary import BUILTIN_VOCABULARY, Vocabulary

#: Hard ceiling on selections the exhaustive oracle will enumerate.
ENUMERATION_LIMIT = 2**20

Answers = Mapping[str, tuple[str, ...]]


def format_score(value: Decimal) -> str:
    """Canonical plain-decimal string: no exponent, no trailing zeros."""
    text = format(value, "f")
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    if text in ("-0", ""):
        text = "0"
    return text


@dataclass(frozen=True)
class WeightVector:
    """Nonnegative per-attribute weights over a fixed vocabulary."""

    weights: Mapping[str, Decimal]

    @classmethod
    def of(
        cls,
        raw: Mapping[str, Decimal | int | float | str],
        vocabulary: Vocabulary = BUILTIN_VOCABULARY,
    ) -> "WeightVector":
        weights: dict[str, Decimal] = {}
        for attr in sorted(raw):
            if attr not in vocabulary:
                raise UnknownAttributeError(
                    f"unknown quality attribute {attr!r}"
                )
            value = raw[attr]
            if isinstance(value, Decimal):
                dec = value
            else:
                try:
                    dec = Decimal(str(value))
                except InvalidOperation:
                    raise ValueError(f"weight for {attr!r} is not a number: {value!r}")
            if not dec.is_finite():
                raise ValueError(f"weight for {attr!r} must be finite")
            if dec < 0:
                raise NegativeWeightError(
                    f"weight for {attr!r} must be nonnegative, got {dec}"
                )
            weights[attr] = dec
        return cls(weights)

    def get(self, attribute: str) -> Decimal:
        return self.weights.get(attribute, Decimal(0))

    def plus(self, other: "WeightVector") -> "WeightVector":
        merged = dict(self.weights)
        for attr, value in other.weights.items():
            merged[attr] = merged.get(attr, Decimal(0)) + value
        return WeightVector({k: merged[k] for k in sorted(merged)})

    def scaled(self, factor: Decimal | int) -> "WeightVector":
        factor = Decimal(factor) if isinstance(factor, int) else factor
        return WeightVector(
            {k: v * factor for k, v in sorted(self.weights.items())}
        )


def score_pattern(pattern: Pattern, weights: WeightVector) -> Decimal:
    """Weighted signed sum of the pattern's impacts; exact arithmetic."""
    total = Decimal(0)
    for impact in pattern.impacts:
        total += weights.get(impact.attribute) * impact.sign
    return total


@dataclass(frozen=True)
class Session:
    """Immutable walk state: answers given so far and what they activate."""

    model: DecisionModel
    answers: dict[str, tuple[str, ...]]
    active: frozenset[str]
    frontier: tuple[str, ...]

    def questions(self) -> tuple[Gateway, ...]:
        return tuple(self.model.gateway_map[g] for g in self.frontier)

    def active_patterns(self) -> tuple[str, ...]:
        return tuple(
            sorted(self.active & set(self.model.pattern_map))
        )

    @property
    def complete(self) -> bool:
        return not self.frontier


def _closure(
    model: DecisionModel, answers: Answers
) -> tuple[frozenset[str], tuple[str, ...]]:
    active: set[str] = set()
    frontier: set[str] = set()
    stack = [model.start]
    gateway_map = model.gateway_map
    pattern_map = model.pattern_map
    while stack:
        node = stack.pop()
        if node in active:
            continue
        active.add(node)
        gw = gateway_map.get(node)
        if gw is not None:
            if gw.kind is GatewayKind.PARALLEL:
                stack.extend(b.target for b in gw.branches)
            elif node in answers:
                chosen = set(answers[node])
                stack.extend(b.target for b in gw.branches if b.label in chosen)
            else:
                frontier.add(node)
        else:
            pat = pattern_map[node]
            if pat.next is not None:
                stack.append(pat.next)
    return frozenset(active), tuple(sorted(frontier))


def _normalize_answers(model: DecisionModel, answers: Answers | Mapping) -> dict[str, tuple[str, ...]]:
    """Validate and normalize an answer map; raises engine errors."""
    normalized: dict[str, tuple[str, ...]] = {}
    for gateway_id in sorted(answers):
        choice = answers[gateway_id]
        gw = model.gateway_map.get(gateway_id)
        if gw is None:
            raise UnknownGatewayError(f"unknown gateway {gateway_id!r}")
        if isinstance(choice, str):
            labels = (choice,)
        else:
            labels = tuple(choice)
        if gw.kind is GatewayKind.PARALLEL:
            raise ArityViolationError(
                f"gateway {gateway_id!r} is parallel and takes no answer"
            )
        known = {b.label for b in gw.branches}
        for label in labels:
            if label not in known:
                raise UnknownBranchError(
                    f"gateway {gateway_id!r} has no branch {label!r}"
                )
        labels = tuple(sorted(set(labels)))
        if not labels:
            raise ArityViolationError(
                f"gateway {gateway_id!r} needs at least one chosen branch"
            )
        if gw.kind is GatewayKind.EXCLUSIVE and len(labels) != 1:
            raise ArityViolationError(
                f"gateway {gateway_id!r} is exclusive and takes exactly one branch"
            )
        normalized[gateway_id] = labels
    return normalized


def start_session(model: DecisionModel) -> Session:
    ensure_traversable(model)
    active, frontier = _closure(model, {})
    return Session(model, {}, active, frontier)


def session_with(model: DecisionModel, answers: Answers | Mapping) -> Session:
    """Build a session directly from a full answer map.

    Answers for gateways the walk never activates are validated but
    dropped, so replaying the same map always lands in the same state no
    matter what order the answers were originally given in.
    """
    ensure_traversable(model)
    merged = _normalize_answers(model, answers)
    active, frontier = _closure(model, merged)
    # Drop answers whose gateways are not activated so a replaced
    # upstream choice discards its stale subtree.
    merged = {g: labels for g, labels in merged.items() if g in active}
    active, frontier = _closure(model, merged)
    return Session(model, merged, active, frontier)


def answer(session: Session, gateway_id: str, choice: str | Iterable[str]) -> Session:
    """Answer (or re-answer) a gateway, returning the recomputed session."""
    merged = dict(session.answers)
    merged.update(_normalize_answers(session.model, {gateway_id: choice}))
    return session_with(session.model, merged)


@dataclass(frozen=True)
class Recommendation:
    pattern: str
    name: str
    summary: str
    score: Decimal
    improves: tuple[str, ...]
    degrades: tuple[str, ...]
    constraints: tuple[str, ...]
    complements: tuple[str, ...]
    path: tuple[str, ...]


def _active_paths(model: DecisionModel, answers: Answers, active: frozenset[str]) -> dict[str, tuple[str, ...]]:
    """Shortest start-to-node paths along activated edges, BFS order."""
    gateway_map = model.gateway_map
    pattern_map = model.pattern_map
    parent: dict[str, str | None] = {model.start: None}
    queue = [model.start]
    while queue:
        node = queue.pop(0)
        gw = gateway_map.get(node)
        if gw is not None:
            if gw.kind is GatewayKind.PARALLEL:
                targets = [b.target for b in gw.branches]
            elif node in answers:
                chosen = set(answers[node])
                targets = [b.target for b in gw.branches if b.label in chosen]
            else:
                targets = []
        else:
            pat = pattern_map[node]
            targets = [pat.next] if pat.next is not None else []
        for target in targets:
            if target not in parent and target in active:
                parent[target] = node
                queue.append(target)
    paths: dict[str, tuple[str, ...]] = {}
    for node in parent:
        chain = [node]
        while parent[chain[-1]] is not None:
            chain.append(parent[chain[-1]])
        paths[node] = tuple(reversed(chain))
    return paths


def recommend(
    model: DecisionModel,
    answers: Answers | Mapping,
    weights: WeightVector,
    k: int | None = None,
) -> tuple[Recommendation, ...]:
    """Rank the patterns activated by ``answers``, highest score first.

    Ties break by pattern id ascending.  ``k`` truncates the list.
    """
    ensure_traversable(model)
    normalized = _normalize_answers(model, answers)
    active, _ = _closure(model, normalized)
    paths = _active_paths(model, normalized, active)
    candidates = sorted(
        pid for pid in active if pid in model.pattern_map
    )
    recs = []
    for pid in candidates:
        pat = model.pattern_map[pid]
        recs.append(
            Recommendation(
                pattern=pid,
                name=pat.name,
                summary=pat.summary,
                score=score_pattern(pat, weights),
                improves=pat.improves(),
                degrades=pat.degrades(),
                constraints=pat.constraints,
                complements=pat.complements,
                path=paths.get(pid, ()),
            )
        )
    recs.sort(key=lambda r: r.pattern)
    recs.sort(key=lambda r: r.score, reverse=True)
    if k is not None:
        recs = recs[: max(k, 0)]
    return tuple(recs)


@dataclass(frozen=True)
class Selection:
    """A complete admissible walk: every activated gateway resolved."""

    answers: dict[str, tuple[str, ...]]
    patterns: tuple[str, ...]
    total_score: Decimal

    def sort_key(self) -> tuple:
        """Orders candidates of EQUAL score; smaller key wins."""
        canonical_answers = tuple(sorted(self.answers.items()))
        return (self.patterns, canonical_answers)


def _gateway_choices(gw: Gateway) -> Iterator[tuple[str, ...]]:
    """Admissible answers for one gateway, deterministic order."""
    labels = [b.label for b in gw.branches]
    if gw.kind is GatewayKind.EXCLUSIVE:
        for label in labels:
            yield (label,)
        return
    # Inclusive: every nonempty subset, in bitmask order over declaration
    # order so smaller subsets of earlier branches come first.
    for mask in range(1, 1 << len(labels)):
        yield tuple(
            sorted(labels[i] for i in range(len(labels)) if mask & (1 << i))
        )


def _make_selection(
    model: DecisionModel,
    answers: dict[str, tuple[str, ...]],
    active: frozenset[str],
    weights: WeightVector,
) -> Selection:
    pattern_ids = tuple(sorted(pid for pid in active if pid in model.pattern_map))
    total = Decimal(0)
    for pid in pattern_ids:
        total += score_pattern(model.pattern_map[pid], weights)
    kept = {g: labels for g, labels in sorted(answers.items()) if g in active}
    return Selection(kept, pattern_ids, total)


def _better(candidate: Selection, incumbent: Selection | None) -> bool:
    if incumbent is None:
        return True
    if candidate.total_score != incumbent.total_score:
        return candidate.total_score > incumbent.total_score
    return candidate.sort_key() < incumbent.sort_key()


def iter_admissible_selections(
    model: DecisionModel, weights: WeightVector
) -> Iterator[Selection]:
    """Yield every admissible selection (complete answer assignment)."""
    ensure_traversable(model)

    def walk(answers: dict[str, tuple[str, ...]]) -> Iterator[Selection]:
        active, frontier = _closure(model, answers)
        if not frontier:
            yield _make_selection(model, answers, active, weights)
            return
        gw = model.gateway_map[frontier[0]]
        for choice in _gateway_choices(gw):
            yield from walk({**answers, gw.id: choice})

    yield from walk({})


def brute_force_oracle(model: DecisionModel, weights: WeightVector) -> Selection:
    """Exhaustively enumerate selections and return the best one.

    Refuses models with more than ``ENUMERATION_LIMIT`` admissible
    selections.  Tie-break: lexicographically smallest sorted pattern-id
    tuple, then smallest canonical answer list.
    """
    best: Selection | None = None
    count = 0
    for selection in iter_admissible_selections(model, weights):
        count += 1
        if count > ENUMERATION_LIMIT:
            raise TooLargeToEnumerateError(
                f"model admits more than {ENUMERATION_LIMIT} selections"
            )
        if _better(selection, best):
            best = selection
    assert best is not None  # every traversable model admits a selection
    return best


def _reachable_pattern_sets(model: DecisionModel) -> dict[str, frozenset[str]]:
    """For each node, the pattern ids reachable from it (pure reachability)."""
    order = sorted(model.node_ids())
    result: dict[str, frozenset[str]] = {}

    def visit(node: str, trail: set[str]) -> frozenset[str]:
        if node in result:
            return result[node]
        if node in trail:  # cycle guard; traversable models never hit this
            return frozenset()
        trail.add(node)
        acc: set[str] = set()
        if node in model.pattern_map:
            acc.add(node)
        for target in model.edges_from(node):
            acc |= visit(target, trail)
        trail.discard(node)
        result[node] = frozenset(acc)
        return result[node]

    for node in order:
        visit(node, set())
    return result


def auto_select(model: DecisionModel, weights: WeightVector) -> Selection:
    """Best admissible selection by exhaustive search with sound pruning.

    Matches ``brute_force_oracle`` exactly, including tie-breaks: a branch
    is pruned only when its optimistic bound falls strictly below the best
    score found so far, so equal-score candidates still get compared.
    """
    ensure_traversable(model)
    reach = _reachable_pattern_sets(model)
    scores = {p.id: score_pattern(p, weights) for p in model.patterns}
    positive = {pid: s for pid, s in scores.items() if s > 0}
    best: Selection | None = None

    def walk(answers: dict[str, tuple[str, ...]]) -> None:
        nonlocal best
        active, frontier = _closure(model, answers)
        if not frontier:
            candidate = _make_selection(model, answers, active, weights)
            if _better(candidate, best):
                best = candidate
            return
        if best is not None:
            definite = sum(
                (scores[pid] for pid in active if pid in scores), Decimal(0)
            )
            could_add: set[str] = set()
            for gateway_id in frontier:
                could_add |= reach[gateway_id]
            potential = sum(
                (positive[pid] for pid in could_add - active if pid in positive),
                Decimal(0),
            )
            if definite + potential < best.total_score:
                return
        gw = model.gateway_map[frontier[0]]
        for choice in _gateway_choices(gw):
            walk({**answers, gw.id: choice})

    walk({})
    assert best is not None
    return best


@dataclass(frozen=True)
class ScoreDelta:
    pattern: str
    score_a: Decimal
    score_b: Decimal

    @property
    def delta(self) -> Decimal:
        return self.score_b - self.score_a


@dataclass(frozen=True)
class RankMove:
    pattern: str
    rank_a: int
    rank_b: int


@dataclass(frozen=True)
class WhatIfReport:
    """Difference between two weightings over one fixed answer set."""

    score_deltas: tuple[ScoreDelta, ...]
    rank_moves: tuple[RankMove, ...]
    flipped_pairs: tuple[tuple[str, str], ...]

    @property
    def unchanged(self) -> bool:
        return not (self.score_deltas or self.rank_moves or self.flipped_pairs)


def compare_whatif(
    model: DecisionModel,
    answers: Answers | Mapping,
    weights_a: WeightVector,
    weights_b: WeightVector,
) -> WhatIfReport:
    """Contrast the rankings two weight vectors produce for one walk."""
    recs_a = recommend(model, answers, weights_a)
    recs_b = recommend(model, answers, weights_b)
    rank_a = {r.pattern: i + 1 for i, r in enumerate(recs_a)}
    rank_b = {r.pattern: i + 1 for i, r in enumerate(recs_b)}
    score_a = {r.pattern: r.score for r in recs_a}
    score_b = {r.pattern: r.score for r in recs_b}

    deltas = tuple(
        ScoreDelta(pid, score_a[pid], score_b[pid])
        for pid in sorted(score_a)
        if score_a[pid] != score_b[pid]
    )
    moves = tuple(
        RankMove(pid, rank_a[pid], rank_b[pid])
        for pid in sorted(rank_a)
        if rank_a[pid] != rank_b[pid]
    )
    flipped = []
    ids = sorted(rank_a)
    for i, p in enumerate(ids):
        for q in ids[i + 1 :]:
            if (rank_a[p] < rank_a[q]) != (rank_b[p] < rank_b[q]):
                flipped.append((p, q))
    return WhatIfReport(deltas, moves, tuple(flipped))
