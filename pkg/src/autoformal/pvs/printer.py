"""Canonical printer for the PVS subset.

Layout: header line, BEGIN, importings first, one declaration per line
with exactly one blank line between declarations, END line. Keywords
upper-case, 2-space indent, LF endings.
"""

from __future__ import annotations

from .nodes import (
    BindingGroup,
    Declaration,
    DeclKind,
    ExprKind,
    ExprNode,
    TheoryAst,
    TypeExpr,
    TypeKind,
)

__all__ = ["InvariantViolation", "print_theory", "print_declaration", "print_expr", "print_type"]


class InvariantViolation(ValueError):
    pass


_PREC = {
    "IFF": 10,
    "IMPLIES": 20,
    "OR": 30,
    "AND": 40,
    "=": 60, "/=": 60, "<": 60, "<=": 60, ">": 60, ">=": 60,
    "+": 70, "-": 70,
    "*": 80, "/": 80,
}
_RIGHT_ASSOC = {"IMPLIES"}
_ATOM_PREC = 100
_BINDER_PREC = 0
_NOT_PREC = 50


def print_type(ty: TypeExpr) -> str:
    if ty.kind is TypeKind.NAMED:
        if ty.args:
            return f"{ty.name}[{', '.join(print_type(a) for a in ty.args)}]"
        return str(ty.name)
    if ty.kind is TypeKind.FUNCTION:
        *domain, rng = ty.args
        return f"[{', '.join(print_type(d) for d in domain)} -> {print_type(rng)}]"
    if ty.kind is TypeKind.TUPLE:
        return f"[{', '.join(print_type(a) for a in ty.args)}]"
    raise InvariantViolation(f"unknown type kind {ty.kind!r}")


def _print_bindings(groups: list[BindingGroup]) -> str:
    return ", ".join(f"{', '.join(g.names)}: {print_type(g.type)}" for g in groups)


def _expr_prec(node: ExprNode) -> int:
    if node.node_kind is ExprKind.BINARY_OP:
        return _PREC[node.atom or ""]
    if node.node_kind in (ExprKind.FORALL, ExprKind.EXISTS, ExprKind.LAMBDA):
        return _BINDER_PREC
    if node.node_kind is ExprKind.APPLICATION:
        if _is_not(node):
            return _NOT_PREC
        return _ATOM_PREC
    return _ATOM_PREC


def _is_not(node: ExprNode) -> bool:
    return (
        node.node_kind is ExprKind.APPLICATION
        and len(node.children) == 2
        and node.children[0].node_kind is ExprKind.NAME_REF
        and node.children[0].atom == "NOT"
    )


def print_expr(node: ExprNode, min_prec: int = 0) -> str:
    text = _expr_text(node)
    if _expr_prec(node) < min_prec:
        return f"({text})"
    return text


def _expr_text(node: ExprNode) -> str:
    kind = node.node_kind
    if kind is ExprKind.NAME_REF:
        return str(node.atom)
    if kind is ExprKind.NUMBER_LITERAL:
        return str(node.atom)
    if kind is ExprKind.PARENTHESIZED:
        return f"({print_expr(node.children[0])})"
    if kind is ExprKind.TUPLE:
        return f"({', '.join(print_expr(c) for c in node.children)})"
    if kind is ExprKind.BINARY_OP:
        op = node.atom or ""
        prec = _PREC[op]
        left_min = prec + 1 if op in _RIGHT_ASSOC else prec
        right_min = prec if op in _RIGHT_ASSOC else prec + 1
        left = print_expr(node.children[0], left_min)
        right = print_expr(node.children[1], right_min)
        return f"{left} {op} {right}"
    if kind is ExprKind.APPLICATION:
        if _is_not(node):
            return f"NOT {print_expr(node.children[1], _NOT_PREC)}"
        fn = print_expr(node.children[0], _ATOM_PREC)
        args = ", ".join(print_expr(c) for c in node.children[1:])
        return f"{fn}({args})"
    if kind in (ExprKind.FORALL, ExprKind.EXISTS, ExprKind.LAMBDA):
        word = kind.value.upper()
        return f"{word} ({_print_bindings(node.bindings)}): {print_expr(node.children[0])}"
    if kind is ExprKind.SET_COMPREHENSION:
        return (
            "{" + _print_bindings(node.bindings) + " | " + print_expr(node.children[0]) + "}"
        )
    raise InvariantViolation(f"unknown expression kind {kind!r}")


def print_declaration(decl: Declaration) -> str:
    kind = decl.decl_kind
    if kind is DeclKind.OPAQUE:
        if not decl.text:
            raise InvariantViolation("opaque declaration without text")
        return decl.text
    if kind is DeclKind.UNINTERPRETED_TYPE:
        return f"{decl.name}: TYPE"
    if kind is DeclKind.TYPE_DECL:
        if decl.signature is None:
            raise InvariantViolation(f"type declaration {decl.name!r} lacks a definition")
        return f"{decl.name}: TYPE = {print_type(decl.signature)}"
    if kind is DeclKind.VAR_DECL:
        if decl.signature is None:
            raise InvariantViolation(f"variable declaration {decl.name!r} lacks a type")
        return f"{decl.name}: VAR {print_type(decl.signature)}"
    if kind is DeclKind.CONST_DECL:
        if decl.signature is None:
            raise InvariantViolation(f"constant declaration {decl.name!r} lacks a type")
        return f"{decl.name}: {print_type(decl.signature)}"
    if kind is DeclKind.DEF_DECL:
        if decl.signature is None or decl.body is None:
            raise InvariantViolation(f"definition {decl.name!r} needs a type and a body")
        params = f"({_print_bindings(decl.params)})" if decl.params else ""
        return f"{decl.name}{params}: {print_type(decl.signature)} = {print_expr(decl.body)}"
    if kind is DeclKind.FORMULA_DECL:
        if decl.body is None or decl.formula_class is None:
            raise InvariantViolation(f"formula {decl.name!r} needs a class and a body")
        if decl.signature is not None:
            raise InvariantViolation(f"formula {decl.name!r} must not carry a signature")
        return f"{decl.name}: {decl.formula_class} {print_expr(decl.body)}"
    raise InvariantViolation(f"unknown declaration kind {kind!r}")


def print_theory(ast: TheoryAst) -> str:
    if not ast.name:
        raise InvariantViolation("theory has no name")
    if ast.end_name and ast.end_name != ast.name:
        raise InvariantViolation(
            f"end name {ast.end_name!r} does not match theory name {ast.name!r}"
        )
    seen: set[str] = set()
    for decl in ast.declarations:
        if decl.name:
            if decl.name in seen:
                raise InvariantViolation(f"duplicate declaration name {decl.name!r}")
            seen.add(decl.name)

    formals = f"[{_print_bindings(ast.formals)}]" if ast.formals else ""
    lines = [f"{ast.name}{formals}: THEORY", "BEGIN"]
    for imp in ast.importings:
        lines.append(f"  IMPORTING {imp.name}")
    body_chunks: list[str] = []
    for decl in ast.declarations:
        text = print_declaration(decl)
        body_chunks.append("\n".join("  " + line if line.strip() else line
                                     for line in text.split("\n")))
    if body_chunks:
        lines.append("")
        lines.append("\n\n".join(body_chunks))
    lines.append(f"END {ast.name}")
    return "\n".join(lines) + "\n"
