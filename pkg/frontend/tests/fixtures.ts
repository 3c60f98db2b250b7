import type {
  ConceptGraph,
  Diagnostic,
  RepairLogEntry,
  StatementRow,
  TheoryDetail,
} from "../src/types.js";

export function stmt(overrides: Partial<StatementRow> = {}): StatementRow {
  return {
    stmt_id: "stmt-000000000001",
    kind: "definition",
    label: "Definition 1",
    body_latex: "A map is injective when distinct points have distinct images.",
    introduced_terms: ["mapping"],
    used_terms: [],
    source_span: [0, 10],
    proves: null,
    canonical_term: "mapping",
    doc_id: "doc-1",
    latest_version: "thv-aaaaaaaaaaaaaaaa",
    abstraction: null,
    ...overrides,
  };
}

export function fiveStatements(): StatementRow[] {
  const defs = [1, 2, 3, 4].map((n) =>
    stmt({
      stmt_id: `stmt-00000000000${n}`,
      label: `Definition ${n}`,
      canonical_term: ["mapping", "cantor space", "symbolic space", "effective symbolic space"][n - 1],
    }),
  );
  const theorem = stmt({
    stmt_id: "stmt-000000000005",
    kind: "theorem",
    label: null,
    canonical_term: null,
    used_terms: ["mapping", "effective symbolic space"],
  });
  return [...defs, theorem];
}

export function diamondGraph(): ConceptGraph {
  return {
    nodes: [
      "stmt-000000000001",
      "stmt-000000000002",
      "stmt-000000000003",
      "stmt-000000000004",
      "stmt-000000000005",
    ],
    edges: [
      { from: "stmt-000000000001", to: "stmt-000000000004", via_term: "mapping" },
      { from: "stmt-000000000001", to: "stmt-000000000005", via_term: "mapping" },
      { from: "stmt-000000000002", to: "stmt-000000000003", via_term: "cantor space" },
      { from: "stmt-000000000003", to: "stmt-000000000004", via_term: "symbolic space" },
      { from: "stmt-000000000003", to: "stmt-000000000005", via_term: "symbolic space" },
      { from: "stmt-000000000004", to: "stmt-000000000005", via_term: "effective symbolic space" },
    ],
  };
}

export function diag(overrides: Partial<Diagnostic> = {}): Diagnostic {
  return {
    code: "W_UNUSED_DECL",
    severity: "warning",
    span: [3, 5, 7],
    message: "'x' is never referenced",
    fixable: false,
    data: {},
    ...overrides,
  };
}

export function theory(overrides: Partial<TheoryDetail> = {}): TheoryDetail {
  return {
    version_id: "thv-aaaaaaaaaaaaaaaa",
    parent_id: null,
    origin: "llm",
    stmt_ids: ["stmt-000000000001"],
    created_at: "2026-01-01T00:00:00Z",
    author_note: null,
    extra: {},
    text: "Mappings: THEORY\nBEGIN\n  x: nat\nEND Mappings\n",
    diagnostics: [],
    check: null,
    is_latest: true,
    ...overrides,
  };
}

export function repairEntries(): RepairLogEntry[] {
  return [
    {
      rule_id: "rewrite_header",
      span: [0, 16],
      text_before: "mappings: THEORY",
      text_after: "Mappings: THEORY",
      pass_number: 1,
    },
    {
      rule_id: "move_importing_after_begin",
      span: [17, 40],
      text_before: "IMPORTING set_theory",
      text_after: "",
      pass_number: 1,
    },
    {
      rule_id: "rename_reference",
      span: [41, 60],
      text_before: "set_theory",
      text_after: "sets",
      pass_number: 1,
    },
  ];
}
