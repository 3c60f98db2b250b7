"""AST node types for the PVS subset.

Source spans are carried for diagnostics but excluded from structural
equality, so round-trip comparisons see shape only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

Span = tuple[int, int]


class TypeKind(Enum):
    NAMED = "named"
    FUNCTION = "function"
    TUPLE = "tuple"


class ExprKind(Enum):
    NAME_REF = "name_ref"
    APPLICATION = "application"
    LAMBDA = "lambda"
    FORALL = "forall"
    EXISTS = "exists"
    BINARY_OP = "binary_op"
    TUPLE = "tuple"
    SET_COMPREHENSION = "set_comprehension"
    NUMBER_LITERAL = "number_literal"
    PARENTHESIZED = "parenthesized"


class DeclKind(Enum):
    TYPE_DECL = "type_decl"
    UNINTERPRETED_TYPE = "uninterpreted_type"
    CONST_DECL = "const_decl"
    VAR_DECL = "var_decl"
    DEF_DECL = "def_decl"
    FORMULA_DECL = "formula_decl"
    OPAQUE = "opaque"


@dataclass
class TypeExpr:
    kind: TypeKind
    # NAMED: name + optional actuals in args; FUNCTION: args = domain types
    # then range (last); TUPLE: args = component types
    name: Optional[str] = None
    args: list["TypeExpr"] = field(default_factory=list)
    span: Span = field(default=(0, 0), compare=False)


@dataclass
class BindingGroup:
    names: list[str]
    type: TypeExpr


@dataclass
class ExprNode:
    node_kind: ExprKind
    children: list["ExprNode"] = field(default_factory=list)
    # NAME_REF: the identifier; NUMBER_LITERAL: digits; BINARY_OP: operator
    atom: Optional[str] = None
    bindings: list[BindingGroup] = field(default_factory=list)
    span: Span = field(default=(0, 0), compare=False)


@dataclass
class Declaration:
    decl_kind: DeclKind
    name: Optional[str]
    formula_class: Optional[str] = None
    params: list[BindingGroup] = field(default_factory=list)
    signature: Optional[TypeExpr] = None
    body: Optional[ExprNode] = None
    # OPAQUE only: verbatim source text, printed as-is
    text: Optional[str] = None
    span: Span = field(default=(0, 0), compare=False)


@dataclass
class Importing:
    # "sets" or "sets[nat]": bracket actuals kept verbatim in the name
    name: str
    span: Span = field(default=(0, 0), compare=False)


@dataclass
class TheoryAst:
    name: str
    formals: list[BindingGroup] = field(default_factory=list)
    importings: list[Importing] = field(default_factory=list)
    declarations: list[Declaration] = field(default_factory=list)
    end_name: str = ""
    span: Span = field(default=(0, 0), compare=False)
    # original source text, kept for diagnostics and span mapping
    source: Optional[str] = field(default=None, compare=False)
