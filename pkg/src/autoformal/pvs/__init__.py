"""Front end for a pragmatic subset of the PVS specification language."""

from .diagnostics import REGISTRY, Diagnostic, Severity
from .lexer import Token, TokenKind, lex
from .nodes import (
    BindingGroup,
    Declaration,
    DeclKind,
    ExprKind,
    ExprNode,
    Importing,
    TheoryAst,
    TypeExpr,
    TypeKind,
)
from .parser import ParseResult, parse_theory
from .printer import InvariantViolation, print_declaration, print_expr, print_theory, print_type
from .prelude import PreludeIndex, load_prelude
from .linter import lint, lint_text

__all__ = [
    "REGISTRY",
    "Diagnostic",
    "Severity",
    "Token",
    "TokenKind",
    "lex",
    "BindingGroup",
    "Declaration",
    "DeclKind",
    "ExprKind",
    "ExprNode",
    "Importing",
    "TheoryAst",
    "TypeExpr",
    "TypeKind",
    "ParseResult",
    "parse_theory",
    "InvariantViolation",
    "print_declaration",
    "print_expr",
    "print_theory",
    "print_type",
    "PreludeIndex",
    "load_prelude",
    "lint",
    "lint_text",
]
