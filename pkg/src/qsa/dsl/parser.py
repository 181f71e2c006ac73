"""Recursive-descent parser for the model text format.

Parsing has three phases: tokenize, syntactic pass (statement oriented,
resynchronizes at line ends so several errors can be reported in one run),
and a semantic pass that mirrors model validation but points at concrete
source spans.  A model is only produced when no error was found, so a
``ParseResult`` either carries a model that is clean apart from warnings,
or ``None`` plus at least one error diagnostic.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from ..model import (
    Branch,
    DecisionModel,
    DesignArea,
    Direction,
    Gateway,
    GatewayKind,
    ModelMeta,
    Pattern,
    QualityImpact,
)
from ..vocabulary import BUILTIN_VOCABULARY, Vocabulary
from .diagnostics import Diagnostic, DiagnosticSeverity, SourceSpan
from .lexer import Token, TokenKind, tokenize

MAX_NESTING_DEPTH = 32

_DOC_START = SourceSpan(1, 1, 1, 1)


@dataclass(frozen=True)
class ParseResult:
    """Outcome of parsing: a model when clean, always all diagnostics.

    ``node_spans`` maps each declared node id to its definition span so
    downstream tooling can point at the right line.
    """

    model: DecisionModel | None
    diagnostics: tuple[Diagnostic, ...]
    node_spans: dict[str, SourceSpan] = dc_field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.model is not None

    def errors(self) -> tuple[Diagnostic, ...]:
        return tuple(d for d in self.diagnostics if d.is_error)


@dataclass
class _RawBranch:
    label: Token
    condition: Token
    target: Token


@dataclass
class _RawGateway:
    id: Token
    kind: GatewayKind | None
    question: Token | None
    branches: list[_RawBranch] = dc_field(default_factory=list)


@dataclass
class _RawImpact:
    direction: Direction
    name: Token
    resolved: str | None = None


@dataclass
class _RawPattern:
    id: Token
    name: Token
    summary: Token | None = None
    canonical: tuple[Token, Token] | None = None
    impacts: list[_RawImpact] = dc_field(default_factory=list)
    constraints: list[Token] = dc_field(default_factory=list)
    complements: list[Token] = dc_field(default_factory=list)
    next: Token | None = None
    refs: list[Token] = dc_field(default_factory=list)
    final_complements: list[str] = dc_field(default_factory=list)


class _Parser:
    def __init__(self, tokens: list[Token], vocabulary: Vocabulary):
        self.toks = tokens
        self.i = 0
        self.vocabulary = vocabulary
        self.diagnostics: list[Diagnostic] = []
        self.area_token: Token | None = None
        self.title_token: Token | None = None
        self.model_keyword_span: SourceSpan = _DOC_START
        self.start_token: Token | None = None
        self.version_token: Token | None = None
        self.source_tokens: list[Token] = []
        self.gateways: list[_RawGateway] = []
        self.patterns: list[_RawPattern] = []

    # -- diagnostics ----------------------------------------------------

    def _error(self, code: str, message: str, span: SourceSpan) -> None:
        self.diagnostics.append(
            Diagnostic(DiagnosticSeverity.ERROR, code, message, span)
        )

    def _warning(self, code: str, message: str, span: SourceSpan) -> None:
        self.diagnostics.append(
            Diagnostic(DiagnosticSeverity.WARNING, code, message, span)
        )

    # -- token cursor ---------------------------------------------------

    def _peek(self) -> Token:
        return self.toks[self.i]

    def _at(self, kind: TokenKind) -> bool:
        return self.toks[self.i].kind is kind

    def _at_keyword(self, word: str) -> bool:
        tok = self.toks[self.i]
        return tok.kind is TokenKind.IDENT and tok.text == word

    def _advance(self) -> Token:
        tok = self.toks[self.i]
        if tok.kind is not TokenKind.EOF:
            self.i += 1
        return tok

    def _take(self, kind: TokenKind) -> Token | None:
        if self._at(kind):
            return self._advance()
        return None

    def _expect(self, kind: TokenKind, what: str) -> Token | None:
        if self._at(kind):
            return self._advance()
        got = self._peek()
        shown = got.text if got.text else str(got.kind.value)
        self._error(
            "unexpected-token",
            f"expected {what}, found {shown!r}",
            got.span,
        )
        return None

    def _expect_keyword(self, word: str) -> Token | None:
        if self._at_keyword(word):
            return self._advance()
        got = self._peek()
        shown = got.text if got.text else str(got.kind.value)
        self._error(
            "unexpected-token",
            f"expected {word!r}, found {shown!r}",
            got.span,
        )
        return None

    def _skip_newlines(self) -> None:
        while self._at(TokenKind.NEWLINE):
            self._advance()

    def _sync_line(self) -> None:
        """Skip to the end of the current line, leaving '}' for the caller."""
        while not self._at(TokenKind.EOF) and not self._at(TokenKind.RBRACE):
            if self._advance().kind is TokenKind.NEWLINE:
                return

    def _end_statement(self) -> None:
        if self._at(TokenKind.NEWLINE):
            self._skip_newlines()
            return
        if self._at(TokenKind.RBRACE) or self._at(TokenKind.EOF):
            return
        got = self._peek()
        self._error(
            "unexpected-token",
            f"expected end of line, found {got.text!r}",
            got.span,
        )
        self._sync_line()

    # -- syntactic pass ---------------------------------------------------

    def run(self) -> DecisionModel | None:
        if self._over_depth_limit():
            return None
        self._skip_newlines()
        if self._at(TokenKind.EOF):
            self._error("empty-document", "no model found in document", _DOC_START)
            return None
        self._parse_model()
        if not any(d.is_error for d in self.diagnostics):
            self._analyze()
        if any(d.is_error for d in self.diagnostics):
            return None
        return self._build()

    def _over_depth_limit(self) -> bool:
        depth = 0
        for tok in self.toks:
            if tok.kind is TokenKind.LBRACE:
                depth += 1
                if depth > MAX_NESTING_DEPTH:
                    self._error(
                        "max-depth",
                        f"nesting exceeds {MAX_NESTING_DEPTH} levels",
                        tok.span,
                    )
                    return True
            elif tok.kind is TokenKind.RBRACE:
                depth = max(0, depth - 1)
        return False

    def _parse_model(self) -> None:
        kw = self._expect_keyword("model")
        if kw is None:
            self._sync_line()
            return
        self.model_keyword_span = kw.span
        self.area_token = self._expect(TokenKind.IDENT, "a design area id")
        self.title_token = self._expect(TokenKind.STRING, "a quoted title")
        if self._expect(TokenKind.LBRACE, "'{'") is None:
            self._sync_line()
        self._skip_newlines()
        while not self._at(TokenKind.RBRACE) and not self._at(TokenKind.EOF):
            self._parse_model_item()
            self._skip_newlines()
        self._expect(TokenKind.RBRACE, "'}'")
        self._skip_newlines()
        if not self._at(TokenKind.EOF):
            self._error(
                "trailing-content",
                "content after the closing '}' of the model",
                self._peek().span,
            )

    def _parse_model_item(self) -> None:
        if self._at_keyword("start"):
            self._advance()
            if self._expect(TokenKind.ARROW, "'->'") is None:
                self._sync_line()
                return
            target = self._expect(TokenKind.IDENT, "a node id")
            if target is None:
                self._sync_line()
                return
            if self.start_token is not None:
                self._error(
                    "duplicate-statement", "start is declared twice", target.span
                )
            else:
                self.start_token = target
            self._end_statement()
        elif self._at_keyword("version"):
            kw = self._advance()
            value = self._expect(TokenKind.STRING, "a quoted version")
            if value is None:
                self._sync_line()
                return
            if self.version_token is not None:
                self._error(
                    "duplicate-statement", "version is declared twice", value.span
                )
            else:
                self.version_token = value
            self._end_statement()
        elif self._at_keyword("source"):
            self._advance()
            value = self._expect(TokenKind.STRING, "a quoted source")
            if value is None:
                self._sync_line()
                return
            self.source_tokens.append(value)
            self._end_statement()
        elif self._at_keyword("gateway"):
            self._parse_gateway()
        elif self._at_keyword("pattern"):
            self._parse_pattern()
        else:
            got = self._peek()
            shown = got.text if got.text else str(got.kind.value)
            self._error(
                "unexpected-token",
                f"expected a model statement, found {shown!r}",
                got.span,
            )
            self._sync_line()

    def _parse_gateway(self) -> None:
        self._advance()  # 'gateway'
        gw_id = self._expect(TokenKind.IDENT, "a gateway id")
        if gw_id is None:
            self._sync_line()
            return
        kind: GatewayKind | None = None
        if self._expect_keyword("kind") is None or self._expect(TokenKind.EQUALS, "'='") is None:
            self._sync_line()
            return
        kind_tok = self._expect(TokenKind.IDENT, "a gateway kind")
        if kind_tok is None:
            self._sync_line()
            return
        try:
            kind = GatewayKind(kind_tok.text)
        except ValueError:
            self._error(
                "unknown-gateway-kind",
                f"{kind_tok.text!r} is not one of inclusive, exclusive, parallel",
                kind_tok.span,
            )
        if self._expect_keyword("question") is None or self._expect(TokenKind.EQUALS, "'='") is None:
            self._sync_line()
            return
        question = self._expect(TokenKind.STRING, "a quoted question")
        if question is None or self._expect(TokenKind.LBRACE, "'{'") is None:
            self._sync_line()
            return
        raw = _RawGateway(gw_id, kind, question)
        self.gateways.append(raw)
        self._skip_newlines()
        while not self._at(TokenKind.RBRACE) and not self._at(TokenKind.EOF):
            self._parse_branch(raw)
            self._skip_newlines()
        self._expect(TokenKind.RBRACE, "'}'")
        self._end_statement()

    def _parse_branch(self, raw: _RawGateway) -> None:
        if not self._at_keyword("branch"):
            got = self._peek()
            shown = got.text if got.text else str(got.kind.value)
            self._error(
                "unexpected-token",
                f"expected 'branch', found {shown!r}",
                got.span,
            )
            self._sync_line()
            return
        self._advance()
        label = self._expect(TokenKind.IDENT, "a branch label")
        if label is None:
            self._sync_line()
            return
        if self._expect_keyword("when") is None:
            self._sync_line()
            return
        condition = self._expect(TokenKind.STRING, "a quoted condition")
        if condition is None:
            self._sync_line()
            return
        if self._expect(TokenKind.ARROW, "'->'") is None:
            self._sync_line()
            return
        target = self._expect(TokenKind.IDENT, "a target node id")
        if target is None:
            self._sync_line()
            return
        raw.branches.append(_RawBranch(label, condition, target))
        self._end_statement()

    def _parse_pattern(self) -> None:
        self._advance()  # 'pattern'
        pat_id = self._expect(TokenKind.IDENT, "a pattern id")
        if pat_id is None:
            self._sync_line()
            return
        if self._expect_keyword("name") is None or self._expect(TokenKind.EQUALS, "'='") is None:
            self._sync_line()
            return
        name = self._expect(TokenKind.STRING, "a quoted name")
        if name is None or self._expect(TokenKind.LBRACE, "'{'") is None:
            self._sync_line()
            return
        raw = _RawPattern(pat_id, name)
        self.patterns.append(raw)
        self._skip_newlines()
        while not self._at(TokenKind.RBRACE) and not self._at(TokenKind.EOF):
            self._parse_pattern_item(raw)
            self._skip_newlines()
        self._expect(TokenKind.RBRACE, "'}'")
        self._end_statement()

    def _parse_pattern_item(self, raw: _RawPattern) -> None:
        if self._at_keyword("summary"):
            self._advance()
            value = self._expect(TokenKind.STRING, "a quoted summary")
            if value is None:
                self._sync_line()
                return
            if raw.summary is not None:
                self._error(
                    "duplicate-statement", "summary is declared twice", value.span
                )
            else:
                raw.summary = value
            self._end_statement()
        elif self._at_keyword("canonical"):
            self._advance()
            area = self._expect(TokenKind.IDENT, "a design area id")
            if area is None:
                self._sync_line()
                return
            pattern = self._expect(TokenKind.IDENT, "a pattern id")
            if pattern is None:
                self._sync_line()
                return
            if raw.canonical is not None:
                self._error(
                    "duplicate-statement", "canonical is declared twice", pattern.span
                )
            else:
                raw.canonical = (area, pattern)
            self._end_statement()
        elif self._at_keyword("improves") or self._at_keyword("degrades"):
            direction = (
                Direction.IMPROVES
                if self._advance().text == "improves"
                else Direction.DEGRADES
            )
            while True:
                tok = self._peek()
                if tok.kind in (TokenKind.IDENT, TokenKind.STRING):
                    self._advance()
                    raw.impacts.append(_RawImpact(direction, tok))
                else:
                    shown = tok.text if tok.text else str(tok.kind.value)
                    self._error(
                        "unexpected-token",
                        f"expected a quality attribute, found {shown!r}",
                        tok.span,
                    )
                    self._sync_line()
                    return
                if self._take(TokenKind.COMMA) is None:
                    break
            self._end_statement()
        elif self._at_keyword("constraint"):
            self._advance()
            value = self._expect(TokenKind.STRING, "a quoted constraint")
            if value is None:
                self._sync_line()
                return
            raw.constraints.append(value)
            self._end_statement()
        elif self._at_keyword("complements"):
            self._advance()
            while True:
                value = self._expect(TokenKind.IDENT, "a pattern id")
                if value is None:
                    self._sync_line()
                    return
                raw.complements.append(value)
                if self._take(TokenKind.COMMA) is None:
                    break
            self._end_statement()
        elif self._at_keyword("next"):
            self._advance()
            value = self._expect(TokenKind.IDENT, "a node id")
            if value is None:
                self._sync_line()
                return
            if raw.next is not None:
                self._error(
                    "duplicate-statement", "next is declared twice", value.span
                )
            else:
                raw.next = value
            self._end_statement()
        elif self._at_keyword("ref"):
            self._advance()
            value = self._expect(TokenKind.STRING, "a quoted reference")
            if value is None:
                self._sync_line()
                return
            raw.refs.append(value)
            self._end_statement()
        else:
            got = self._peek()
            shown = got.text if got.text else str(got.kind.value)
            self._error(
                "unexpected-token",
                f"expected a pattern statement, found {shown!r}",
                got.span,
            )
            self._sync_line()

    # -- semantic pass ----------------------------------------------------

    def _analyze(self) -> None:
        if self.area_token is not None:
            try:
                DesignArea.from_id(self.area_token.text)
            except ValueError:
                self._error(
                    "unknown-area",
                    f"{self.area_token.text!r} is not a known design area",
                    self.area_token.span,
                )

        defined: dict[str, Token] = {}
        duplicate_ids = False
        for node_tok in [g.id for g in self.gateways] + [p.id for p in self.patterns]:
            if node_tok.text in defined:
                duplicate_ids = True
                self._error(
                    "duplicate-id",
                    f"node id {node_tok.text!r} is defined more than once",
                    node_tok.span,
                )
            else:
                defined[node_tok.text] = node_tok
        node_ids = set(defined)
        pattern_ids = {p.id.text for p in self.patterns}

        for gw in self.gateways:
            if not gw.branches:
                self._error("gateway-needs-branch", "gateway has no branches", gw.id.span)
            if gw.kind is GatewayKind.EXCLUSIVE and len(gw.branches) < 2:
                self._error(
                    "exclusive-needs-two",
                    "exclusive gateway needs at least two branches",
                    gw.id.span,
                )
            labels: set[str] = set()
            for br in gw.branches:
                if br.label.text in labels:
                    self._error(
                        "duplicate-branch-label",
                        f"branch label {br.label.text!r} appears more than once",
                        br.label.span,
                    )
                labels.add(br.label.text)
                if br.target.text not in node_ids:
                    self._error(
                        "dangling-target",
                        f"branch targets unknown node {br.target.text!r}",
                        br.target.span,
                    )

        for pat in self.patterns:
            self._analyze_impacts(pat)
            if pat.canonical is not None:
                area_tok = pat.canonical[0]
                try:
                    DesignArea.from_id(area_tok.text)
                except ValueError:
                    self._error(
                        "unknown-area",
                        f"{area_tok.text!r} is not a known design area",
                        area_tok.span,
                    )
            if pat.next is not None and pat.next.text not in node_ids:
                self._error(
                    "dangling-target",
                    f"conditional flow targets unknown node {pat.next.text!r}",
                    pat.next.span,
                )
            for comp in pat.complements:
                if comp.text not in pattern_ids:
                    self._error(
                        "dangling-complement",
                        f"complement {comp.text!r} is not a pattern in this model",
                        comp.span,
                    )

        if self.start_token is None:
            self._error(
                "missing-start", "model declares no start node", self.model_keyword_span
            )
        elif self.start_token.text not in node_ids:
            self._error(
                "missing-start",
                f"start targets unknown node {self.start_token.text!r}",
                self.start_token.span,
            )

        if not duplicate_ids:
            self._analyze_graph(node_ids)
        self._close_complements()

    def _analyze_impacts(self, pat: _RawPattern) -> None:
        seen: set[tuple[str, Direction]] = set()
        signs: dict[str, Direction] = {}
        for imp in pat.impacts:
            raw_name = imp.name.value if imp.name.kind is TokenKind.STRING else imp.name.text
            resolved = self.vocabulary.resolve(raw_name)
            if resolved is None:
                self._error(
                    "unknown-qa",
                    f"{raw_name!r} is not a known quality attribute",
                    imp.name.span,
                )
                continue
            if resolved != raw_name:
                self._warning(
                    "qa-alias",
                    f"{raw_name!r} resolves to {resolved!r}; prefer the canonical id",
                    imp.name.span,
                )
            imp.resolved = resolved
            key = (resolved, imp.direction)
            if key in seen:
                self._error(
                    "duplicate-impact",
                    f"impact {imp.direction.value} {resolved!r} is listed twice",
                    imp.name.span,
                )
            seen.add(key)
            if resolved in signs and signs[resolved] is not imp.direction:
                self._error(
                    "conflicting-impact",
                    f"attribute {resolved!r} is both improved and degraded",
                    imp.name.span,
                )
            signs.setdefault(resolved, imp.direction)

    def _analyze_graph(self, node_ids: set[str]) -> None:
        edges: dict[str, list[str]] = {n: [] for n in node_ids}
        for gw in self.gateways:
            edges[gw.id.text] = [
                b.target.text for b in gw.branches if b.target.text in node_ids
            ]
        for pat in self.patterns:
            if pat.next is not None and pat.next.text in node_ids:
                edges[pat.id.text] = [pat.next.text]

        cycle = _find_cycle_in(edges)
        if cycle is not None:
            self._error(
                "cycle",
                "cycle detected: " + " -> ".join(cycle),
                self.model_keyword_span,
            )

        if self.start_token is not None and self.start_token.text in node_ids:
            reached: set[str] = set()
            stack = [self.start_token.text]
            while stack:
                node = stack.pop()
                if node in reached:
                    continue
                reached.add(node)
                stack.extend(edges[node])
            for gw in self.gateways:
                if gw.id.text not in reached:
                    self._error(
                        "unreachable-node",
                        "node cannot be reached from start",
                        gw.id.span,
                    )
            for pat in self.patterns:
                if pat.id.text not in reached:
                    self._error(
                        "unreachable-node",
                        "node cannot be reached from start",
                        pat.id.span,
                    )

    def _close_complements(self) -> None:
        """Make complements symmetric, warning about each one-way edge."""
        by_id = {p.id.text: p for p in self.patterns}
        for pat in self.patterns:
            pat.final_complements = []
            for comp in pat.complements:
                if comp.text not in pat.final_complements:
                    pat.final_complements.append(comp.text)
        for pat in self.patterns:
            for comp in pat.complements:
                other = by_id.get(comp.text)
                if other is None:
                    continue
                if pat.id.text not in other.final_complements:
                    self._warning(
                        "asymmetric-complements",
                        f"{pat.id.text!r} complements {comp.text!r} but not vice versa; "
                        "the reverse link was added",
                        comp.span,
                    )
                    other.final_complements.append(pat.id.text)

    # -- model construction ------------------------------------------------

    def _build(self) -> DecisionModel | None:
        if self.area_token is None or self.title_token is None or self.start_token is None:
            return None
        gateways = tuple(
            Gateway(
                id=gw.id.text,
                kind=gw.kind if gw.kind is not None else GatewayKind.INCLUSIVE,
                question=gw.question.value if gw.question else "",
                branches=tuple(
                    Branch(b.label.text, b.condition.value, b.target.text)
                    for b in gw.branches
                ),
            )
            for gw in sorted(self.gateways, key=lambda g: g.id.text)
        )
        patterns = tuple(
            Pattern(
                id=pat.id.text,
                name=pat.name.value,
                # Group improves before degrades (stable within each group) so
                # serialized output reparses to an equal impact tuple.
                impacts=tuple(
                    QualityImpact(imp.resolved, imp.direction)
                    for imp in sorted(
                        pat.impacts, key=lambda i: i.direction is Direction.DEGRADES
                    )
                    if imp.resolved is not None
                ),
                summary=pat.summary.value if pat.summary else "",
                constraints=tuple(t.value for t in pat.constraints),
                complements=tuple(pat.final_complements),
                next=pat.next.text if pat.next else None,
                refs=tuple(t.value for t in pat.refs),
                canonical=(
                    (pat.canonical[0].text, pat.canonical[1].text)
                    if pat.canonical
                    else None
                ),
            )
            for pat in sorted(self.patterns, key=lambda p: p.id.text)
        )
        return DecisionModel(
            area=DesignArea.from_id(self.area_token.text),
            start=self.start_token.text,
            gateways=gateways,
            patterns=patterns,
            meta=ModelMeta(
                title=self.title_token.value,
                version=self.version_token.value if self.version_token else "1",
                sources=tuple(t.value for t in self.source_tokens),
            ),
        )


def _find_cycle_in(edges: dict[str, list[str]]) -> list[str] | None:
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {n: WHITE for n in edges}
    parent: dict[str, str] = {}
    for root in sorted(edges):
        if color[root] != WHITE:
            continue
        stack = [(root, iter(edges[root]))]
        color[root] = GRAY
        while stack:
            node, it = stack[-1]
            advanced = False
            for target in it:
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
                    stack.append((target, iter(edges[target])))
                    advanced = True
                    break
            if not advanced:
                color[node] = BLACK
                stack.pop()
    return None


def parse(
    source: str | bytes, vocabulary: Vocabulary = BUILTIN_VOCABULARY
) -> ParseResult:
    """Parse a document; total over arbitrary input, never raises."""
    if isinstance(source, bytes):
        text = source.decode("utf-8", errors="replace")
    else:
        text = source
    tokens, lex_diagnostics = tokenize(text)
    parser = _Parser(tokens, vocabulary)
    parser.diagnostics.extend(lex_diagnostics)
    model = parser.run()
    ordered = tuple(
        sorted(
            parser.diagnostics,
            key=lambda d: (d.span.line, d.span.col, d.code, d.message),
        )
    )
    node_spans: dict[str, SourceSpan] = {}
    for raw in [*parser.gateways, *parser.patterns]:
        node_spans.setdefault(raw.id.text, raw.id.span)
    return ParseResult(model, ordered, node_spans)
