"""S-expression reader for planning files.

Tokens keep their source line/column so that parse errors can point at the
offending construct. Identifiers are folded to lower case on read.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import PddlSyntaxError


@dataclass(frozen=True)
class Token:
    text: str
    line: int
    col: int


@dataclass
class SList:
    """A parenthesised list; ``items`` holds Tokens and nested SLists."""

    items: list = field(default_factory=list)
    line: int = 0
    col: int = 0

    def __len__(self) -> int:
        return len(self.items)

    def __getitem__(self, idx):
        return self.items[idx]

    def head(self) -> str | None:
        if self.items and isinstance(self.items[0], Token):
            return self.items[0].text
        return None


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch == ";":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch in "()":
            tokens.append(Token(ch, line, col))
            i += 1
            col += 1
            continue
        start, start_col = i, col
        while i < n and not text[i].isspace() and text[i] not in "();":
            i += 1
            col += 1
        word = text[start:i]
        if any(c in word for c in "\"'`{}[]"):
            raise PddlSyntaxError(f"unexpected characters in token {word!r}", line, start_col)
        tokens.append(Token(word.lower(), line, start_col))
    return tokens


def read(text: str) -> SList:
    """Read exactly one top-level s-expression from ``text``."""
    tokens = tokenize(text)
    if not tokens:
        raise PddlSyntaxError("empty input", 1, 1)
    stack: list[SList] = []
    root: SList | None = None
    for tok in tokens:
        if tok.text == "(":
            node = SList([], tok.line, tok.col)
            if stack:
                stack[-1].items.append(node)
            elif root is not None:
                raise PddlSyntaxError("trailing content after top-level expression", tok.line, tok.col)
            else:
                root = node
            stack.append(node)
        elif tok.text == ")":
            if not stack:
                raise PddlSyntaxError("unbalanced ')'", tok.line, tok.col)
            stack.pop()
        else:
            if not stack:
                raise PddlSyntaxError(f"token {tok.text!r} outside of any expression", tok.line, tok.col)
            stack[-1].items.append(tok)
    if stack:
        open_node = stack[-1]
        raise PddlSyntaxError("unbalanced '(' (missing ')')", open_node.line, open_node.col)
    assert root is not None
    return root
