"""Tokenizer shared by the tCFG, formula and PTRANS readers."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParseError

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<local>%[A-Za-z_.][\w.]*)
  | (?P<global>@[A-Za-z_.][\w.]*)
  | (?P<int>-?\d+)
  | (?P<ident>[A-Za-z_][\w']*)
  | (?P<op>/\\|\\/|->|<->|[,()*=:;{}\[\]~.!&|])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str  # local | global | int | ident | op | eof
    text: str
    line: int
    column: int


def tokenize(text: str, line: int = 1, column: int = 1) -> list:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, column)
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, chunk, line, column))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            column = len(chunk) - chunk.rfind("\n")
        else:
            column += len(chunk)
        pos = m.end()
    tokens.append(Token("eof", "", line, column))
    return tokens


class TokenStream:
    def __init__(self, tokens: list):
        self.tokens = tokens
        self.pos = 0

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at(self, text: str, offset: int = 0) -> bool:
        tok = self.peek(offset)
        return tok.kind in ("op", "ident") and tok.text == text

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.pos += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if not self.at(text):
            self.error(f"expected {text!r}, found {tok.text or 'end of input'!r}")
        return self.next()

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.peek()
        raise ParseError(message, tok.line, tok.column)
