"""Tokenizer for the contract surface syntax.

Comments are `(* ... *)` and nest. Every token carries a 1-based source
span.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ast import SourceSpan

KEYWORDS = frozenset(
    [
        "contract",
        "transition",
        "continuation",
        "if",
        "then",
        "else",
        "let",
        "in",
        "send",
        "return",
        "not",
        "true",
        "false",
        "ok_msg",
        "no_msg",
    ]
)

# Longest match first.
_OPERATORS = [
    "<-",
    "<=",
    "=>",
    "->",
    "==",
    "&&",
    ":=",
    "||",
    "<",
    ">",
    "&",
    "=",
    "+",
    "-",
    "(",
    ")",
    "{",
    "}",
    "[",
    "]",
    ",",
    ";",
    ":",
]


class ParseError(Exception):
    def __init__(self, span: SourceSpan, message: str, expected: str | None = None, found: str | None = None):
        self.span = span
        self.message = message
        self.expected = expected
        self.found = found
        super().__init__(f"line {span.line}, col {span.col}: {message}")


class UnterminatedComment(ParseError):
    pass


class UnterminatedString(ParseError):
    pass


class IllegalCharacter(ParseError):
    pass


@dataclass(frozen=True, slots=True)
class Token:
    kind: str  # "ident" | "int" | "string" | "kw" | "op" | "eof"
    text: str
    span: SourceSpan


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    line = 1
    col = 1
    n = len(source)

    def here(length: int = 1) -> SourceSpan:
        return SourceSpan(line, col, length)

    def advance(k: int) -> None:
        nonlocal pos, line, col
        for _ in range(k):
            if source[pos] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            pos += 1

    while pos < n:
        c = source[pos]
        if c in " \t\r\n":
            advance(1)
            continue
        if source.startswith("(*", pos):
            start = here(2)
            depth = 1
            advance(2)
            while depth > 0:
                if pos >= n:
                    raise UnterminatedComment(start, "unterminated comment")
                if source.startswith("(*", pos):
                    depth += 1
                    advance(2)
                elif source.startswith("*)", pos):
                    depth -= 1
                    advance(2)
                else:
                    advance(1)
            continue
        if c == '"':
            start = here()
            advance(1)
            chars: list[str] = []
            while True:
                if pos >= n or source[pos] == "\n":
                    raise UnterminatedString(start, "unterminated string literal")
                if source[pos] == '"':
                    advance(1)
                    break
                chars.append(source[pos])
                advance(1)
            text = "".join(chars)
            tokens.append(Token("string", text, SourceSpan(start.line, start.col, len(text) + 2)))
            continue
        if c.isdigit():
            start = here()
            j = pos
            while j < n and source[j].isdigit():
                j += 1
            text = source[pos:j]
            advance(j - pos)
            tokens.append(Token("int", text, SourceSpan(start.line, start.col, len(text))))
            continue
        if c.isalpha() or c == "_":
            start = here()
            j = pos
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            text = source[pos:j]
            advance(j - pos)
            kind = "kw" if text in KEYWORDS else "ident"
            tokens.append(Token(kind, text, SourceSpan(start.line, start.col, len(text))))
            continue
        for op in _OPERATORS:
            if source.startswith(op, pos):
                start = here(len(op))
                advance(len(op))
                tokens.append(Token("op", op, start))
                break
        else:
            raise IllegalCharacter(here(), f"illegal character {c!r}")
    tokens.append(Token("eof", "", SourceSpan(line, col, 0)))
    return tokens
