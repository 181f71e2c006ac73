"""Tokenizer for the model text format.

Never raises on malformed input: unknown characters, bad escapes, and
unterminated strings become diagnostics and lexing continues, so the
parser always gets a complete token stream ending in EOF.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .diagnostics import Diagnostic, DiagnosticSeverity, SourceSpan


class TokenKind(enum.Enum):
    IDENT = "identifier"
    STRING = "string"
    LBRACE = "'{'"
    RBRACE = "'}'"
    EQUALS = "'='"
    ARROW = "'->'"
    COMMA = "','"
    NEWLINE = "newline"
    EOF = "end of input"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    value: str
    span: SourceSpan


_IDENT_START = "abcdefghijklmnopqrstuvwxyz"
_IDENT_CONT = _IDENT_START + "0123456789-"
_ESCAPES = {"\\": "\\", '"': '"', "n": "\n", "t": "\t", "r": "\r"}


class Lexer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1
        self.tokens: list[Token] = []
        self.diagnostics: list[Diagnostic] = []

    def _span_from(self, line: int, col: int) -> SourceSpan:
        return SourceSpan(line, col, self.line, self.col)

    def _advance(self) -> str:
        ch = self.text[self.pos]
        self.pos += 1
        if ch == "\n":
            self.line += 1
            self.col = 1
        else:
            self.col += 1
        return ch

    def _peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _emit(self, kind: TokenKind, text: str, value: str, span: SourceSpan) -> None:
        self.tokens.append(Token(kind, text, value, span))

    def _error(self, code: str, message: str, span: SourceSpan) -> None:
        self.diagnostics.append(
            Diagnostic(DiagnosticSeverity.ERROR, code, message, span)
        )

    def run(self) -> tuple[list[Token], list[Diagnostic]]:
        while self.pos < len(self.text):
            line, col = self.line, self.col
            ch = self._peek()
            if ch == "\n":
                self._advance()
                self._emit(TokenKind.NEWLINE, "\n", "\n", self._span_from(line, col))
            elif ch in " \t\r":
                self._advance()
            elif ch == "#":
                while self._peek() and self._peek() != "\n":
                    self._advance()
            elif ch == "{":
                self._advance()
                self._emit(TokenKind.LBRACE, "{", "{", self._span_from(line, col))
            elif ch == "}":
                self._advance()
                self._emit(TokenKind.RBRACE, "}", "}", self._span_from(line, col))
            elif ch == "=":
                self._advance()
                self._emit(TokenKind.EQUALS, "=", "=", self._span_from(line, col))
            elif ch == ",":
                self._advance()
                self._emit(TokenKind.COMMA, ",", ",", self._span_from(line, col))
            elif ch == "-" and self.pos + 1 < len(self.text) and self.text[self.pos + 1] == ">":
                self._advance()
                self._advance()
                self._emit(TokenKind.ARROW, "->", "->", self._span_from(line, col))
            elif ch == '"':
                self._lex_string(line, col)
            elif ch in _IDENT_START:
                self._lex_ident(line, col)
            else:
                self._advance()
                self._error(
                    "bad-token",
                    f"unexpected character {ch!r}",
                    self._span_from(line, col),
                )
        eof_span = SourceSpan(self.line, self.col, self.line, self.col)
        self._emit(TokenKind.EOF, "", "", eof_span)
        return self.tokens, self.diagnostics

    def _lex_ident(self, line: int, col: int) -> None:
        start = self.pos
        while self._peek() and self._peek() in _IDENT_CONT:
            self._advance()
        text = self.text[start : self.pos]
        self._emit(TokenKind.IDENT, text, text, self._span_from(line, col))

    def _lex_string(self, line: int, col: int) -> None:
        start = self.pos
        self._advance()  # opening quote
        out: list[str] = []
        while True:
            ch = self._peek()
            if ch == "" or ch == "\n":
                span = self._span_from(line, col)
                self._error("unterminated-string", "string is missing a closing quote", span)
                self._emit(TokenKind.STRING, self.text[start : self.pos], "".join(out), span)
                return
            if ch == '"':
                self._advance()
                span = self._span_from(line, col)
                self._emit(TokenKind.STRING, self.text[start : self.pos], "".join(out), span)
                return
            if ch == "\\":
                esc_line, esc_col = self.line, self.col
                self._advance()
                esc = self._peek()
                if esc in _ESCAPES:
                    self._advance()
                    out.append(_ESCAPES[esc])
                elif esc == "" or esc == "\n":
                    continue  # report as unterminated on next pass
                else:
                    self._advance()
                    self._error(
                        "bad-escape",
                        f"unknown escape sequence '\\{esc}'",
                        SourceSpan(esc_line, esc_col, self.line, self.col),
                    )
                    out.append(esc)
            else:
                out.append(self._advance())


def tokenize(text: str) -> tuple[list[Token], list[Diagnostic]]:
    return Lexer(text).run()
