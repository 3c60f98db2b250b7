"""Name-resolution and consistency checks over parsed theories.

Approximates the typecheck gate for environments without a real PVS:
unknown names, duplicate declarations, arity mismatches, unused
declarations. Opaque declarations are scanned for name usage but never
flagged themselves.
"""

from __future__ import annotations

from typing import Optional

from .diagnostics import Diagnostic, make_diagnostic
from .lexer import TokenKind, lex
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
from .parser import parse_theory
from .prelude import DEFAULT_RENAMES, PreludeIndex, load_prelude

__all__ = ["lint", "lint_text"]

_ALWAYS_KNOWN = {"NOT", "TYPE"}


def lint(
    ast: TheoryAst,
    prelude: Optional[PreludeIndex] = None,
    rename_table: Optional[dict[str, str]] = None,
) -> list[Diagnostic]:
    prelude = prelude or load_prelude()
    renames = DEFAULT_RENAMES if rename_table is None else rename_table
    text = ast.source or ""
    diags: list[Diagnostic] = []

    formal_names = {name for g in ast.formals for name in g.names}
    decl_names: set[str] = set()
    arity: dict[str, int] = {}
    seen: dict[str, Declaration] = {}
    for decl in ast.declarations:
        if not decl.name:
            continue
        if decl.name in seen:
            start = decl.span[0]
            diags.append(
                make_diagnostic(
                    text,
                    "E_DUP_DECL",
                    start,
                    start + len(decl.name),
                    f"declaration {decl.name!r} already defined in this theory",
                    data={"name": decl.name},
                )
            )
        else:
            seen[decl.name] = decl
        decl_names.add(decl.name)
        if decl.decl_kind is DeclKind.DEF_DECL and decl.params:
            arity[decl.name] = sum(len(g.names) for g in decl.params)

    def known(name: str) -> bool:
        return (
            name in _ALWAYS_KNOWN
            or name in decl_names
            or name in formal_names
            or name in prelude
        )

    def report_unknown(name: str, span: tuple[int, int]) -> None:
        suggested = renames.get(name)
        diags.append(
            make_diagnostic(
                text,
                "E_UNKNOWN_PRELUDE_NAME",
                span[0],
                span[1],
                f"unknown name {name!r}"
                + (f", did you mean {suggested!r}" if suggested else ""),
                data={"found": name, "suggested": suggested} if suggested else {"found": name},
                fixable=suggested is not None,
            )
        )

    usage: dict[str, int] = {}
    current_decl: list[Optional[str]] = [None]

    def mark_use(name: str) -> None:
        # a declaration referencing itself does not count as usage
        if name == current_decl[0]:
            return
        usage[name] = usage.get(name, 0) + 1

    for imp in ast.importings:
        base = imp.name.split("[", 1)[0].strip()
        if not known(base):
            # span may cover actuals; point at the base name only
            report_unknown(base, (imp.span[0], imp.span[0] + len(base)))

    def walk_type(ty: TypeExpr, bound: set[str]) -> None:
        if ty.kind is TypeKind.NAMED:
            name = ty.name or ""
            if name not in bound:
                if known(name):
                    mark_use(name)
                else:
                    report_unknown(name, (ty.span[0], ty.span[0] + len(name)))
        for arg in ty.args:
            walk_type(arg, bound)

    def walk_bindings(groups: list[BindingGroup], bound: set[str]) -> set[str]:
        extended = set(bound)
        for g in groups:
            walk_type(g.type, bound)
            extended.update(g.names)
        return extended

    def walk_expr(node: ExprNode, bound: set[str]) -> None:
        kind = node.node_kind
        if kind is ExprKind.NAME_REF:
            name = node.atom or ""
            if name in bound:
                return
            if known(name):
                mark_use(name)
            else:
                report_unknown(name, (node.span[0], node.span[0] + len(name)))
            return
        if kind is ExprKind.APPLICATION:
            fn = node.children[0]
            if (
                fn.node_kind is ExprKind.NAME_REF
                and fn.atom in arity
                and fn.atom not in bound
            ):
                expected = arity[fn.atom]
                got = len(node.children) - 1
                if got != expected:
                    diags.append(
                        make_diagnostic(
                            text,
                            "E_ARITY",
                            node.span[0],
                            node.span[1],
                            f"{fn.atom!r} takes {expected} argument(s), got {got}",
                            data={"name": fn.atom, "expected": expected, "got": got},
                        )
                    )
            for child in node.children:
                walk_expr(child, bound)
            return
        if kind in (ExprKind.FORALL, ExprKind.EXISTS, ExprKind.LAMBDA, ExprKind.SET_COMPREHENSION):
            inner = walk_bindings(node.bindings, bound)
            for child in node.children:
                walk_expr(child, inner)
            return
        for child in node.children:
            walk_expr(child, bound)

    for decl in ast.declarations:
        bound: set[str] = set()
        current_decl[0] = decl.name
        if decl.decl_kind is DeclKind.OPAQUE:
            if decl.text:
                tokens, _ = lex(decl.text)
                for tok in tokens:
                    if tok.kind is TokenKind.IDENT:
                        mark_use(tok.text)
            continue
        if decl.params:
            bound = walk_bindings(decl.params, bound)
        if decl.signature is not None:
            walk_type(decl.signature, bound)
        if decl.body is not None:
            walk_expr(decl.body, bound)
    current_decl[0] = None

    for decl in ast.declarations:
        if decl.decl_kind in (DeclKind.FORMULA_DECL, DeclKind.OPAQUE) or not decl.name:
            continue
        if usage.get(decl.name, 0) == 0:
            start = decl.span[0]
            diags.append(
                make_diagnostic(
                    text,
                    "W_UNUSED_DECL",
                    start,
                    start + len(decl.name),
                    f"{decl.name!r} is never referenced",
                    data={"name": decl.name},
                )
            )

    diags.sort(key=lambda d: (d.data.get("start", 0), d.code))
    return diags


def lint_text(
    text: str,
    prelude: Optional[PreludeIndex] = None,
    rename_table: Optional[dict[str, str]] = None,
) -> list[Diagnostic]:
    """Parse then lint; parse diagnostics come first."""
    result = parse_theory(text)
    diags = list(result.diagnostics)
    if result.ast is not None:
        diags.extend(lint(result.ast, prelude, rename_table))
    return diags
