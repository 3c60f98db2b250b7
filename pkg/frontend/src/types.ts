/**
 * Client-side mirrors of the review service JSON payloads.
 *
 * Everything here is reconstructable from API GETs; no field is
 * authoritative on the client side.
 */

export type StatementKind = "definition" | "theorem" | "lemma" | "proposition" | "corollary";

export type TheoryOrigin = "llm" | "repair" | "merge" | "human";

export type RunStatus = "running" | "ok" | "needs_human" | "failed" | "skipped";

export interface ProjectSummary {
  project_id: string;
  root: string;
  documents: number;
  statements: number;
  theories: number;
}

export interface Abstraction {
  stmt_id: string;
  text: string;
  template: string;
  template_version: string;
}

export interface StatementRow {
  stmt_id: string;
  kind: StatementKind;
  label: string | null;
  body_latex: string;
  introduced_terms: string[];
  used_terms: string[];
  source_span: [number, number];
  proves: string | null;
  canonical_term: string | null;
  doc_id: string;
  latest_version: string | null;
  abstraction: Abstraction | null;
}

export interface DocumentSummary {
  doc_id: string;
  title: string | null;
}

export interface SourceDocument {
  doc_id: string;
  format: "latex" | "nougat_markdown";
  raw_text: string;
  title: string | null;
  spans: number[][];
}

export interface GraphEdge {
  from: string;
  to: string;
  via_term: string;
}

export interface ConceptGraph {
  nodes: string[];
  edges: GraphEdge[];
}

/** span is [line, column, length]; line and column are 1-based. */
export interface Diagnostic {
  code: string;
  severity: "error" | "warning";
  span: [number, number, number];
  message: string;
  fixable: boolean;
  data: Record<string, unknown>;
}

export interface CheckRecord {
  backend: string;
  parse_ok: boolean;
  typecheck_ok: boolean;
  diagnostics: Diagnostic[];
  raw_output: string;
  duration_ms: number;
}

/** One applied rewrite from a repair pass; span is [start, end] in char offsets. */
export interface RepairLogEntry {
  rule_id: string;
  span: [number, number];
  text_before: string;
  text_after: string;
  pass_number: number;
}

export interface TheoryMeta {
  version_id: string;
  parent_id: string | null;
  origin: TheoryOrigin;
  stmt_ids: string[];
  created_at: string;
  author_note: string | null;
  extra: Record<string, unknown>;
}

export interface TheoryDetail extends TheoryMeta {
  text: string;
  diagnostics: Diagnostic[];
  check: CheckRecord | null;
  is_latest: boolean;
}

export interface PutTheoryResult {
  version_id: string;
  created: boolean;
}

export interface GateList {
  pending: string[];
}

export interface StageStarted {
  run_id: string;
  status: "running";
}

export interface RunRecord {
  run_id: string;
  stage: string;
  status: RunStatus;
  inputs?: string[];
  outputs?: string[];
  notes?: string;
  created_at?: string;
  project_id?: string;
}

export interface VerdictRecord {
  verdict_id: string;
  gate: string;
  decision: "approve" | "reject";
  note: string;
  created_at: string;
}

export interface DiffResponse {
  from: string;
  to: string;
  diff: string;
}

export interface ApiErrorBody {
  http_status: number;
  code: string;
  message: string;
  detail: string | null;
}

export const STAGE_NAMES = [
  "ingest",
  "extract",
  "graph",
  "summarize",
  "abstract",
  "formalize",
  "repair",
  "merge",
  "check",
  "prove",
] as const;

export type StageName = (typeof STAGE_NAMES)[number];
