"""Lexer for the PVS subset.

Tokens carry exact source spans; concatenating token texts with the
original inter-token whitespace reconstructs the input byte-for-byte.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .diagnostics import Diagnostic, make_diagnostic


class TokenKind(Enum):
    IDENT = "identifier"
    KEYWORD = "keyword"
    NUMBER = "number"
    OP = "operator"
    PUNCT = "punctuation"
    COMMENT = "comment"


# recognized case-insensitively; canonical form is upper-case
KEYWORDS = {
    "THEORY", "BEGIN", "END", "IMPORTING", "TYPE", "VAR",
    "AXIOM", "LEMMA", "THEOREM", "PROPOSITION", "COROLLARY", "OBLIGATION",
    "FORALL", "EXISTS", "LAMBDA",
    "AND", "OR", "IMPLIES", "IFF", "NOT",
}

FORMULA_CLASSES = {"AXIOM", "LEMMA", "THEOREM", "PROPOSITION", "COROLLARY", "OBLIGATION"}

# longest match first
_MULTI_OPS = ["<=>", "->", "=>", "/=", "<=", ">="]
_SINGLE_OPS = set("=<>+-*/&")
_PUNCT = set(":,()[]{}|.")


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    start: int
    end: int

    @property
    def canon(self) -> str:
        """Canonical spelling: keywords upper-cased, all else verbatim."""
        if self.kind is TokenKind.KEYWORD:
            return self.text.upper()
        return self.text


def _is_ident_start(ch: str) -> bool:
    return ch.isalpha()


def _is_ident_char(ch: str) -> bool:
    return ch.isalnum() or ch in "_?"


def lex(text: str) -> tuple[list[Token], list[Diagnostic]]:
    tokens: list[Token] = []
    diags: list[Diagnostic] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in " \t\n":
            i += 1
            continue
        if ch == "%":
            end = text.find("\n", i)
            end = n if end < 0 else end
            tokens.append(Token(TokenKind.COMMENT, text[i:end], i, end))
            i = end
            continue
        if _is_ident_start(ch):
            j = i + 1
            while j < n and _is_ident_char(text[j]):
                j += 1
            word = text[i:j]
            kind = TokenKind.KEYWORD if word.upper() in KEYWORDS else TokenKind.IDENT
            tokens.append(Token(kind, word, i, j))
            i = j
            continue
        if ch.isdigit():
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            if j < n - 1 and text[j] == "." and text[j + 1].isdigit():
                j += 2
                while j < n and text[j].isdigit():
                    j += 1
            tokens.append(Token(TokenKind.NUMBER, text[i:j], i, j))
            i = j
            continue
        matched = False
        for op in _MULTI_OPS:
            if text.startswith(op, i):
                tokens.append(Token(TokenKind.OP, op, i, i + len(op)))
                i += len(op)
                matched = True
                break
        if matched:
            continue
        if ch in _SINGLE_OPS:
            tokens.append(Token(TokenKind.OP, ch, i, i + 1))
            i += 1
            continue
        if ch in _PUNCT:
            tokens.append(Token(TokenKind.PUNCT, ch, i, i + 1))
            i += 1
            continue
        diags.append(
            make_diagnostic(text, "E_BAD_CHAR", i, i + 1, f"unexpected character {ch!r}")
        )
        i += 1
    return tokens, diags
