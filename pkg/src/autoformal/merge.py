"""Merge per-statement theories into one self-contained theory.

Policy: importings union by first occurrence, exact-duplicate declarations
collapse to the first copy, same-name-different-body collisions get a
suffix (or a caller-chosen name) with references rewritten inside their
source theory. Formula declarations are never deduplicated: proof attempts
are tracked per formula name, so equal formulas are renamed instead.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Optional

from .pvs.lexer import TokenKind, lex
from .pvs.nodes import (
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
from .pvs.printer import print_declaration

__all__ = ["MergePlan", "MergeNote", "UnresolvableCollision", "merge"]


class UnresolvableCollision(ValueError):
    pass


@dataclass
class MergePlan:
    target_name: str
    source_theories: list[TheoryAst]
    rename_map: dict[tuple[str, str], str] = field(default_factory=dict)


@dataclass
class MergeNote:
    kind: str  # "dedup" | "rename"
    source_theory: str
    decl_name: str
    new_name: Optional[str] = None
    detail: str = ""

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "source_theory": self.source_theory,
            "decl_name": self.decl_name,
            "new_name": self.new_name,
            "detail": self.detail,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "MergeNote":
        return cls(
            kind=obj["kind"],
            source_theory=obj["source_theory"],
            decl_name=obj["decl_name"],
            new_name=obj.get("new_name"),
            detail=obj.get("detail", ""),
        )


def _rewrite_type(ty: TypeExpr, mapping: dict[str, str]) -> TypeExpr:
    name = ty.name
    if ty.kind is TypeKind.NAMED and name in mapping:
        name = mapping[name]
    return TypeExpr(
        kind=ty.kind,
        name=name,
        args=[_rewrite_type(a, mapping) for a in ty.args],
        span=ty.span,
    )


def _rewrite_bindings(
    groups: list[BindingGroup], mapping: dict[str, str]
) -> list[BindingGroup]:
    return [
        BindingGroup(names=list(g.names), type=_rewrite_type(g.type, mapping))
        for g in groups
    ]


def _rewrite_expr(node: ExprNode, mapping: dict[str, str], bound: frozenset[str]) -> ExprNode:
    kind = node.node_kind
    if kind is ExprKind.NAME_REF:
        atom = node.atom
        if atom in mapping and atom not in bound:
            atom = mapping[atom]
        return ExprNode(kind, atom=atom, span=node.span)
    if kind in (ExprKind.FORALL, ExprKind.EXISTS, ExprKind.LAMBDA, ExprKind.SET_COMPREHENSION):
        groups = _rewrite_bindings(node.bindings, mapping)
        inner = bound | {n for g in groups for n in g.names}
        return ExprNode(
            kind,
            children=[_rewrite_expr(c, mapping, inner) for c in node.children],
            bindings=groups,
            span=node.span,
        )
    return ExprNode(
        kind,
        children=[_rewrite_expr(c, mapping, bound) for c in node.children],
        atom=node.atom,
        bindings=node.bindings,
        span=node.span,
    )


def _rewrite_decl(decl: Declaration, mapping: dict[str, str]) -> Declaration:
    if not mapping:
        return copy.deepcopy(decl)
    if decl.decl_kind is DeclKind.OPAQUE:
        # cannot rewrite inside opaque text; caller verified no occurrences
        return copy.deepcopy(decl)
    name = mapping.get(decl.name or "", decl.name)
    params = _rewrite_bindings(decl.params, mapping)
    bound = frozenset(n for g in decl.params for n in g.names)
    return Declaration(
        decl_kind=decl.decl_kind,
        name=name,
        formula_class=decl.formula_class,
        params=params,
        signature=_rewrite_type(decl.signature, mapping) if decl.signature else None,
        body=_rewrite_expr(decl.body, mapping, bound) if decl.body else None,
        text=decl.text,
        span=decl.span,
    )


def _opaque_mentions(decl: Declaration, name: str) -> bool:
    if decl.decl_kind is not DeclKind.OPAQUE or not decl.text:
        return False
    tokens, _ = lex(decl.text)
    return any(t.kind is TokenKind.IDENT and t.text == name for t in tokens)


def merge(plan: MergePlan) -> tuple[TheoryAst, list[MergeNote]]:
    notes: list[MergeNote] = []

    importings: list[Importing] = []
    seen_imports: set[str] = set()
    for theory in plan.source_theories:
        for imp in theory.importings:
            if imp.name not in seen_imports:
                seen_imports.add(imp.name)
                importings.append(Importing(name=imp.name))

    all_source_names = {
        d.name for t in plan.source_theories for d in t.declarations if d.name
    }
    taken = set(all_source_names) | set(plan.rename_map.values())

    # first pass: decide survivor names and which declarations collapse
    emitted: dict[str, tuple[int, str, DeclKind]] = {}
    skip: set[tuple[int, int]] = set()
    renames: dict[int, dict[str, str]] = {}
    for s_idx, theory in enumerate(plan.source_theories):
        for d_idx, decl in enumerate(theory.declarations):
            if not decl.name:
                continue
            printed = print_declaration(decl)
            prev = emitted.get(decl.name)
            if prev is None:
                emitted[decl.name] = (s_idx, printed, decl.decl_kind)
                continue
            if printed == prev[1] and decl.decl_kind is not DeclKind.FORMULA_DECL:
                skip.add((s_idx, d_idx))
                notes.append(
                    MergeNote(
                        kind="dedup",
                        source_theory=theory.name,
                        decl_name=decl.name,
                        detail=f"identical to the copy from {plan.source_theories[prev[0]].name}",
                    )
                )
                continue
            new_name = plan.rename_map.get((theory.name, decl.name))
            if new_name is None:
                k = 2
                while f"{decl.name}_{k}" in taken or f"{decl.name}_{k}" in emitted:
                    k += 1
                new_name = f"{decl.name}_{k}"
            taken.add(new_name)
            renames.setdefault(s_idx, {})[decl.name] = new_name
            emitted[new_name] = (s_idx, printed, decl.decl_kind)
            notes.append(
                MergeNote(
                    kind="rename",
                    source_theory=theory.name,
                    decl_name=decl.name,
                    new_name=new_name,
                    detail=f"collides with {plan.source_theories[prev[0]].name}",
                )
            )

    # renaming must not break opaque text it cannot rewrite
    for s_idx, mapping in renames.items():
        theory = plan.source_theories[s_idx]
        for old in mapping:
            for decl in theory.declarations:
                if _opaque_mentions(decl, old):
                    raise UnresolvableCollision(
                        f"cannot rename {old!r}: referenced inside opaque text "
                        f"in {theory.name}"
                    )

    declarations: list[Declaration] = []
    for s_idx, theory in enumerate(plan.source_theories):
        mapping = renames.get(s_idx, {})
        for d_idx, decl in enumerate(theory.declarations):
            if (s_idx, d_idx) in skip:
                continue
            declarations.append(_rewrite_decl(decl, mapping))

    merged = TheoryAst(
        name=plan.target_name,
        importings=importings,
        declarations=declarations,
        end_name=plan.target_name,
    )
    return merged, notes
