"""Dependency graph over extracted statements.

An edge (a -> b, via_term) means statement b uses a term introduced by
statement a. The graph orders formalization work and scopes prompt context.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .ingest import StatementRecord

__all__ = [
    "Edge",
    "ConceptGraph",
    "DuplicateStatementId",
    "UnknownNode",
    "CycleDetected",
    "build_graph",
    "topo_order",
    "ancestors",
    "to_dot",
]


class DuplicateStatementId(ValueError):
    pass


class UnknownNode(KeyError):
    pass


class CycleDetected(ValueError):
    def __init__(self, cycle: list[str]):
        super().__init__(f"dependency cycle: {' -> '.join(cycle)}")
        self.cycle = cycle


@dataclass(frozen=True)
class Edge:
    from_id: str
    to_id: str
    via_term: str


@dataclass(frozen=True)
class ConceptGraph:
    nodes: tuple[str, ...]
    edges: tuple[Edge, ...]

    def to_json(self) -> dict:
        return {
            "nodes": list(self.nodes),
            "edges": [
                {"from": e.from_id, "to": e.to_id, "via_term": e.via_term}
                for e in self.edges
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "ConceptGraph":
        return cls(
            nodes=tuple(data["nodes"]),
            edges=tuple(
                Edge(e["from"], e["to"], e["via_term"]) for e in data["edges"]
            ),
        )


def build_graph(stmts: Iterable[StatementRecord]) -> ConceptGraph:
    records = list(stmts)
    seen: set[str] = set()
    for r in records:
        if r.stmt_id in seen:
            raise DuplicateStatementId(r.stmt_id)
        seen.add(r.stmt_id)

    edges: list[Edge] = []
    edge_keys: set[tuple[str, str, str]] = set()
    for a in records:
        if not a.introduced_terms:
            continue
        introduced = set(a.introduced_terms)
        for b in records:
            if b.stmt_id == a.stmt_id:
                continue
            for term in b.used_terms:
                if term in introduced:
                    key = (a.stmt_id, b.stmt_id, term)
                    if key not in edge_keys:
                        edge_keys.add(key)
                        edges.append(Edge(*key))
    return ConceptGraph(nodes=tuple(r.stmt_id for r in records), edges=tuple(edges))


def topo_order(g: ConceptGraph) -> list[str]:
    position = {node: i for i, node in enumerate(g.nodes)}
    incoming: dict[str, set[str]] = {node: set() for node in g.nodes}
    outgoing: dict[str, set[str]] = {node: set() for node in g.nodes}
    for e in g.edges:
        incoming[e.to_id].add(e.from_id)
        outgoing[e.from_id].add(e.to_id)

    # Kahn's algorithm; ties broken by document order (node list order)
    order: list[str] = []
    pending = {n for n, deps in incoming.items() if not deps}
    remaining = {n: set(deps) for n, deps in incoming.items()}
    while pending:
        node = min(pending, key=position.__getitem__)
        pending.discard(node)
        order.append(node)
        for succ in outgoing[node]:
            remaining[succ].discard(node)
            if not remaining[succ] and succ not in order:
                pending.add(succ)
    if len(order) != len(g.nodes):
        raise CycleDetected(_find_cycle(g))
    return order


def _find_cycle(g: ConceptGraph) -> list[str]:
    succ: dict[str, list[str]] = {n: [] for n in g.nodes}
    for e in g.edges:
        if e.to_id not in succ[e.from_id]:
            succ[e.from_id].append(e.to_id)

    color: dict[str, int] = {}
    trail: list[str] = []
    found: list[str] = []

    def visit(node: str) -> bool:
        color[node] = 1
        trail.append(node)
        for nxt in succ[node]:
            if color.get(nxt) == 1:
                found.extend(trail[trail.index(nxt):])
                return True
            if color.get(nxt) is None and visit(nxt):
                return True
        trail.pop()
        color[node] = 2
        return False

    for node in g.nodes:
        if color.get(node) is None and visit(node):
            break
    return found


def ancestors(g: ConceptGraph, stmt_id: str) -> set[str]:
    if stmt_id not in g.nodes:
        raise UnknownNode(stmt_id)
    preds: dict[str, set[str]] = {n: set() for n in g.nodes}
    for e in g.edges:
        preds[e.to_id].add(e.from_id)

    result: set[str] = set()
    frontier = list(preds[stmt_id])
    while frontier:
        node = frontier.pop()
        if node in result:
            continue
        result.add(node)
        frontier.extend(preds[node])
    result.discard(stmt_id)
    return result


def to_dot(g: ConceptGraph, records: Optional[Iterable[StatementRecord]] = None) -> str:
    info = {r.stmt_id: r for r in records} if records else {}
    lines = ["digraph concepts {"]
    for node in g.nodes:
        r = info.get(node)
        if r is not None:
            label = r.label or r.stmt_id
            lines.append(f'  "{node}" [label="{label}" kind="{r.kind.value}"];')
        else:
            lines.append(f'  "{node}";')
    for e in g.edges:
        lines.append(f'  "{e.from_id}" -> "{e.to_id}" [label="{e.via_term}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
