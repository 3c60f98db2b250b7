/**
 * Application state.
 *
 * The client never owns authoritative data: everything below either came
 * from an API GET or is transient input (editor buffer, note drafts).
 */

import type { DiffRow } from "./difftext.js";
import type {
  ConceptGraph,
  ProjectSummary,
  RepairLogEntry,
  RunRecord,
  SourceDocument,
  StatementRow,
  TheoryDetail,
  TheoryMeta,
} from "./types.js";

export type PaneName = "statements" | "graph" | "editor" | "diff" | "runs" | "verdicts";

export interface PlannedEdit {
  versionId: string;
  ruleId: string;
  offset: number;
}

export interface ConflictInfo {
  /** Version id the server reported as current when our PUT was rejected. */
  latestId: string;
  message: string;
}

export interface EditorState {
  versionId: string | null;
  theory: TheoryDetail | null;
  lineage: TheoryMeta[];
  buffer: string;
  authorNote: string;
  conflict: ConflictInfo | null;
  repairPlan: PlannedEdit[] | null;
  status: string;
}

export interface DiffState {
  fromId: string;
  toId: string;
  rows: DiffRow[];
  repairLog: RepairLogEntry[];
}

export interface RunConsoleState {
  entries: RunRecord[];
  active: RunRecord | null;
}

export interface AppState {
  projectId: string | null;
  projects: ProjectSummary[];
  statements: StatementRow[];
  graph: ConceptGraph | null;
  gates: string[];
  document: SourceDocument | null;
  pane: PaneName;
  selectedStmt: string | null;
  editor: EditorState;
  diff: DiffState | null;
  runs: RunConsoleState;
  verdictNote: string;
  verdictError: string | null;
  lastError: string | null;
}

export function createInitialState(): AppState {
  return {
    projectId: null,
    projects: [],
    statements: [],
    graph: null,
    gates: [],
    document: null,
    pane: "statements",
    selectedStmt: null,
    editor: {
      versionId: null,
      theory: null,
      lineage: [],
      buffer: "",
      authorNote: "",
      conflict: null,
      repairPlan: null,
      status: "",
    },
    diff: null,
    runs: { entries: [], active: null },
    verdictNote: "",
    verdictError: null,
    lastError: null,
  };
}
