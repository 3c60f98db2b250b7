"""Concept dependency graph construction, ordering, and export."""

import pytest

from autoformal.concepts import (
    ConceptGraph,
    CycleDetected,
    DuplicateStatementId,
    Edge,
    UnknownNode,
    ancestors,
    build_graph,
    to_dot,
    topo_order,
)
from autoformal.ingest import StatementKind, StatementRecord


def _record(stmt_id, kind=StatementKind.DEFINITION, introduced=(), used=()):
    return StatementRecord(
        stmt_id=stmt_id,
        kind=kind,
        label=stmt_id,
        body_latex="body",
        introduced_terms=list(introduced),
        used_terms=list(used),
    )


def _by_term(records):
    return {r.canonical_term: r for r in records if r.canonical_term}


def test_fixture_graph_shape(fixture_records):
    g = build_graph(fixture_records)
    assert len(g.nodes) == 5
    assert len(g.edges) == 6


def test_fixture_graph_contains_required_edges(fixture_records):
    g = build_graph(fixture_records)
    defs = _by_term(fixture_records)
    thm = fixture_records[4]
    pairs = {(e.from_id, e.to_id) for e in g.edges}
    eff = defs["effective symbolic space"].stmt_id
    assert (defs["mapping"].stmt_id, eff) in pairs
    assert (defs["symbolic space"].stmt_id, eff) in pairs
    assert (eff, thm.stmt_id) in pairs
    assert (defs["cantor space"].stmt_id, thm.stmt_id) in pairs


def test_edges_carry_the_linking_term(fixture_records):
    g = build_graph(fixture_records)
    defs = _by_term(fixture_records)
    thm = fixture_records[4]
    via = {
        (e.from_id, e.to_id): e.via_term
        for e in g.edges
    }
    key = (defs["cantor space"].stmt_id, thm.stmt_id)
    assert via[key] == "cantor space"


def test_topo_order_puts_definitions_before_theorem(fixture_records):
    g = build_graph(fixture_records)
    order = topo_order(g)
    assert sorted(order) == sorted(g.nodes)
    thm = fixture_records[4].stmt_id
    assert order[-1] == thm
    for r in fixture_records[:4]:
        assert order.index(r.stmt_id) < order.index(thm)


def test_topo_order_breaks_ties_by_document_order():
    records = [
        _record("s1", introduced=["alpha"]),
        _record("s2"),
        _record("s3", used=["alpha"]),
    ]
    assert topo_order(build_graph(records)) == ["s1", "s2", "s3"]


def test_duplicate_statement_id_rejected():
    records = [_record("same"), _record("same")]
    with pytest.raises(DuplicateStatementId):
        build_graph(records)


def test_self_reference_adds_no_edge():
    records = [_record("s1", introduced=["loop"], used=["loop"])]
    g = build_graph(records)
    assert g.edges == ()


def test_cycle_detected_with_members():
    g = ConceptGraph(
        nodes=("a", "b", "c"),
        edges=(Edge("a", "b", "t1"), Edge("b", "a", "t2")),
    )
    with pytest.raises(CycleDetected) as exc:
        topo_order(g)
    assert set(exc.value.cycle) == {"a", "b"}


def test_ancestors_is_transitive(fixture_records):
    g = build_graph(fixture_records)
    defs = _by_term(fixture_records)
    thm = fixture_records[4]
    result = ancestors(g, thm.stmt_id)
    assert result == {r.stmt_id for r in fixture_records[:4]}
    eff = ancestors(g, defs["effective symbolic space"].stmt_id)
    assert defs["mapping"].stmt_id in eff
    assert defs["cantor space"].stmt_id not in eff


def test_ancestors_unknown_node():
    g = build_graph([_record("only")])
    with pytest.raises(UnknownNode):
        ancestors(g, "missing")


def test_graph_json_round_trip(fixture_records):
    g = build_graph(fixture_records)
    data = g.to_json()
    assert ConceptGraph.from_json(data) == g
    assert ConceptGraph.from_json(data).to_json() == data


def test_to_dot_includes_labels_and_edges(fixture_records):
    g = build_graph(fixture_records)
    dot = to_dot(g, fixture_records)
    assert dot.startswith("digraph concepts {")
    assert dot.rstrip().endswith("}")
    assert 'label="Definition 1"' in dot
    for e in g.edges:
        assert f'"{e.from_id}" -> "{e.to_id}"' in dot


def test_to_dot_without_records_uses_bare_ids():
    g = build_graph([_record("solo")])
    dot = to_dot(g)
    assert '"solo";' in dot
