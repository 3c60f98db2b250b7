/**
 * Workbench controller: owns the state, talks to the API, and renders
 * the active pane. Mutations never update state optimistically; every
 * action waits for the server response, then re-reads through GETs.
 */

import { ApiClient, ApiError } from "./api.js";
import { parseUnifiedDiff } from "./difftext.js";
import { h, type VNode } from "./dom.js";
import {
  createInitialState,
  type AppState,
  type PaneName,
  type PlannedEdit,
} from "./state.js";
import type { RepairLogEntry, RunRecord } from "./types.js";
import { editorView } from "./views/editor.js";
import { graphView } from "./views/graph.js";
import { diffView } from "./views/diffview.js";
import { runsView } from "./views/runs.js";
import { statementsView } from "./views/statements.js";
import { verdictsView } from "./views/verdicts.js";

const PLAN_PREFIX = "dry run; planned edits: ";

/** Parse the repair stage's dry-run notes into structured planned edits. */
export function parsePlannedEdits(notes: string): PlannedEdit[] {
  if (!notes.startsWith(PLAN_PREFIX)) {
    return [];
  }
  const rest = notes.slice(PLAN_PREFIX.length);
  if (rest === "none") {
    return [];
  }
  const edits: PlannedEdit[] = [];
  for (const part of rest.split("; ")) {
    const match = /^(\S+): (\S+) @ (\d+)$/.exec(part);
    if (match) {
      edits.push({ versionId: match[1], ruleId: match[2], offset: Number(match[3]) });
    }
  }
  return edits;
}

/** Pull the current version id out of a stale-save error detail. */
export function parseLatestId(detail: string | null): string | null {
  if (!detail) {
    return null;
  }
  const match = /(thv-[0-9a-f]{16})/.exec(detail);
  return match ? match[1] : null;
}

export interface WorkbenchOptions {
  pollIntervalMs?: number;
}

export class Workbench {
  readonly state: AppState;
  /** Called after every state change so the host can re-render. */
  onChange: (() => void) | null = null;
  private readonly pollIntervalMs: number;

  constructor(
    readonly api: ApiClient,
    options: WorkbenchOptions = {},
  ) {
    this.state = createInitialState();
    this.pollIntervalMs = options.pollIntervalMs ?? 1000;
  }

  private notify(): void {
    this.onChange?.();
  }

  private async action<T>(fn: () => Promise<T>): Promise<T | undefined> {
    this.state.lastError = null;
    try {
      return await fn();
    } catch (err) {
      if (err instanceof ApiError) {
        this.state.lastError = `${err.code}: ${err.message}`;
        return undefined;
      }
      throw err;
    } finally {
      this.notify();
    }
  }

  // ------------------------------------------------------------------
  // loading

  async start(): Promise<void> {
    await this.action(async () => {
      this.state.projects = await this.api.listProjects();
      if (this.state.projects.length > 0) {
        await this.loadProject(this.state.projects[0].project_id);
      }
    });
  }

  async openProject(projectId: string): Promise<void> {
    await this.action(() => this.loadProject(projectId));
  }

  private async loadProject(projectId: string): Promise<void> {
    this.state.projectId = projectId;
    await this.reload();
    const docs = await this.api.listDocuments(projectId);
    this.state.document = docs.length > 0 ? await this.api.getDocument(projectId, docs[0].doc_id) : null;
  }

  /** Re-read statements, graph, and gates; the client keeps nothing extra. */
  private async reload(): Promise<void> {
    const pid = this.requireProject();
    this.state.statements = await this.api.listStatements(pid);
    this.state.gates = (await this.api.getGates(pid)).pending;
    try {
      this.state.graph = await this.api.getGraph(pid);
    } catch (err) {
      if (err instanceof ApiError && err.code === "no_graph") {
        this.state.graph = null;
      } else {
        throw err;
      }
    }
  }

  async refresh(): Promise<void> {
    await this.action(() => this.reload());
  }

  private requireProject(): string {
    if (this.state.projectId === null) {
      throw new Error("no project open");
    }
    return this.state.projectId;
  }

  // ------------------------------------------------------------------
  // navigation

  setPane(pane: PaneName): void {
    this.state.pane = pane;
    this.notify();
  }

  async selectStatement(stmtId: string): Promise<void> {
    await this.action(async () => {
      const pid = this.requireProject();
      this.state.selectedStmt = stmtId;
      const row = this.state.statements.find((s) => s.stmt_id === stmtId);
      if (row && row.doc_id && this.state.document?.doc_id !== row.doc_id) {
        this.state.document = await this.api.getDocument(pid, row.doc_id);
      }
    });
  }

  async openTheory(versionId: string): Promise<void> {
    await this.action(async () => {
      const pid = this.requireProject();
      const theory = await this.api.getTheory(pid, versionId);
      const lineage = await this.api.getLineage(pid, versionId);
      this.state.editor = {
        versionId,
        theory,
        lineage,
        buffer: theory.text,
        authorNote: "",
        conflict: null,
        repairPlan: null,
        status: "",
      };
      this.state.pane = "editor";
    });
  }

  setBuffer(text: string): void {
    this.state.editor.buffer = text;
  }

  setAuthorNote(note: string): void {
    this.state.editor.authorNote = note;
  }

  setVerdictNote(note: string): void {
    this.state.verdictNote = note;
  }

  // ------------------------------------------------------------------
  // editing

  async saveTheory(): Promise<void> {
    await this.action(async () => {
      const pid = this.requireProject();
      const editor = this.state.editor;
      if (editor.versionId === null) {
        return;
      }
      const body: { text: string; author_note?: string } = { text: editor.buffer };
      const note = editor.authorNote.trim();
      if (note) {
        body.author_note = note;
      }
      try {
        const result = await this.api.putTheory(pid, editor.versionId, body);
        if (!result.created) {
          editor.status = `no changes; still ${result.version_id}`;
          return;
        }
        editor.status = `saved ${result.version_id}`;
        await this.reload();
        await this.loadTheoryIntoEditor(result.version_id, editor.status);
      } catch (err) {
        if (err instanceof ApiError && err.code === "stale_version") {
          editor.conflict = {
            latestId: parseLatestId(err.detail) ?? "",
            message: err.message,
          };
          return;
        }
        if (err instanceof ApiError) {
          editor.status = `${err.code}: ${err.message}`;
          return;
        }
        throw err;
      }
    });
  }

  private async loadTheoryIntoEditor(versionId: string, status: string): Promise<void> {
    const pid = this.requireProject();
    const theory = await this.api.getTheory(pid, versionId);
    const lineage = await this.api.getLineage(pid, versionId);
    this.state.editor = {
      versionId,
      theory,
      lineage,
      buffer: theory.text,
      authorNote: "",
      conflict: null,
      repairPlan: null,
      status,
    };
  }

  /** Keep the local buffer but retarget it at the server's latest version. */
  async rebaseOntoLatest(): Promise<void> {
    await this.action(async () => {
      const editor = this.state.editor;
      if (editor.conflict === null || editor.theory === null) {
        return;
      }
      let latestId = editor.conflict.latestId;
      if (!latestId) {
        await this.reload();
        const row = this.state.statements.find((s) => editor.theory?.stmt_ids.includes(s.stmt_id));
        latestId = row?.latest_version ?? "";
      }
      if (!latestId) {
        editor.status = "could not resolve the latest version";
        return;
      }
      const keep = editor.buffer;
      const keepNote = editor.authorNote;
      await this.loadTheoryIntoEditor(latestId, `rebased onto ${latestId}; review and save again`);
      this.state.editor.buffer = keep;
      this.state.editor.authorNote = keepNote;
    });
  }

  /** Drop the local buffer and reload the server's latest version. */
  async discardAndReload(): Promise<void> {
    await this.action(async () => {
      const editor = this.state.editor;
      if (editor.conflict === null) {
        return;
      }
      const latestId = editor.conflict.latestId || editor.versionId;
      if (!latestId) {
        return;
      }
      await this.loadTheoryIntoEditor(latestId, `reloaded ${latestId}`);
    });
  }

  // ------------------------------------------------------------------
  // repairs

  async previewRepairs(): Promise<void> {
    await this.action(async () => {
      const editor = this.state.editor;
      if (editor.versionId === null) {
        return;
      }
      const run = await this.startRun("repair", { dry_run: true });
      const planned = parsePlannedEdits(run.notes ?? "");
      editor.repairPlan = planned.filter((edit) => edit.versionId === editor.versionId);
      editor.status = run.status === "ok" ? "" : `repair preview: ${run.status}`;
    });
  }

  async applyRepairs(): Promise<void> {
    await this.action(async () => {
      const editor = this.state.editor;
      if (editor.versionId === null || editor.theory === null) {
        return;
      }
      const before = editor.versionId;
      const stmtIds = editor.theory.stmt_ids;
      await this.startRun("repair");
      await this.reload();
      const row = this.state.statements.find((s) => stmtIds.includes(s.stmt_id));
      const after = row?.latest_version ?? null;
      if (after === null || after === before) {
        editor.status = "no repairs were needed";
        editor.repairPlan = null;
        return;
      }
      await this.loadTheoryIntoEditor(after, `repairs applied: ${before} became ${after}`);
      await this.showDiff(before, after);
    });
  }

  async openDiff(fromId: string, toId: string): Promise<void> {
    await this.action(() => this.showDiff(fromId, toId));
  }

  private async showDiff(fromId: string, toId: string): Promise<void> {
    const pid = this.requireProject();
    const response = await this.api.getDiff(pid, fromId, toId);
    const target = await this.api.getTheory(pid, toId);
    const repairLog = Array.isArray(target.extra.repair_log)
      ? (target.extra.repair_log as RepairLogEntry[])
      : [];
    this.state.diff = {
      fromId,
      toId,
      rows: parseUnifiedDiff(response.diff),
      repairLog,
    };
    this.state.pane = "diff";
  }

  // ------------------------------------------------------------------
  // runs and verdicts

  private async startRun(stage: string, options?: Record<string, unknown>): Promise<RunRecord> {
    const started = await this.api.postStage(this.requireProject(), stage, options);
    this.state.runs.active = { run_id: started.run_id, stage, status: "running" };
    this.notify();
    try {
      const finished = await this.api.pollRun(started.run_id, {
        intervalMs: this.pollIntervalMs,
        onTick: (record) => {
          this.state.runs.active = record;
          this.notify();
        },
      });
      this.state.runs.entries.push(finished);
      return finished;
    } finally {
      this.state.runs.active = null;
    }
  }

  async runStage(stage: string, options?: Record<string, unknown>): Promise<RunRecord | undefined> {
    return this.action(async () => {
      const finished = await this.startRun(stage, options);
      await this.reload();
      return finished;
    });
  }

  async submitVerdict(gate: string, decision: "approve" | "reject"): Promise<void> {
    await this.action(async () => {
      const pid = this.requireProject();
      const note = this.state.verdictNote.trim();
      if (!note) {
        this.state.verdictError = "a note is required before recording a verdict";
        return;
      }
      await this.api.postVerdict(pid, gate, decision, note);
      this.state.verdictNote = "";
      this.state.verdictError = null;
      this.state.gates = (await this.api.getGates(pid)).pending;
    });
  }

  // ------------------------------------------------------------------
  // rendering

  render(): VNode {
    const state = this.state;
    const panes: PaneName[] = ["statements", "graph", "editor", "diff", "runs", "verdicts"];
    return h(
      "div",
      { class: "workbench" },
      h(
        "header",
        null,
        h("h1", null, "review workbench"),
        h(
          "nav",
          null,
          panes.map((pane) =>
            h(
              "button",
              {
                class: state.pane === pane ? "tab active" : "tab",
                "data-pane": pane,
                onclick: () => this.setPane(pane),
              },
              pane === "verdicts" && state.gates.length > 0 ? `verdicts (${state.gates.length})` : pane,
            ),
          ),
        ),
        state.projectId ? h("span", { class: "project" }, state.projectId) : null,
      ),
      state.lastError ? h("div", { class: "error-banner" }, state.lastError) : null,
      this.renderPane(),
    );
  }

  private renderPane(): VNode {
    const state = this.state;
    switch (state.pane) {
      case "statements":
        return statementsView(state.statements, state.selectedStmt, state.document, {
          onSelect: (stmtId) => void this.selectStatement(stmtId),
          onOpenTheory: (versionId) => void this.openTheory(versionId),
        });
      case "graph":
        return graphView(state.graph, state.statements, {
          onSelect: (stmtId) => void this.selectStatement(stmtId),
        });
      case "editor":
        return editorView(state.editor, {
          onBuffer: (text) => this.setBuffer(text),
          onNote: (note) => this.setAuthorNote(note),
          onSave: () => void this.saveTheory(),
          onPreviewRepairs: () => void this.previewRepairs(),
          onApplyRepairs: () => void this.applyRepairs(),
          onRebase: () => void this.rebaseOntoLatest(),
          onDiscard: () => void this.discardAndReload(),
          onOpenVersion: (versionId) => void this.openTheory(versionId),
        });
      case "diff":
        return diffView(state.diff);
      case "runs":
        return runsView(state.runs, state.gates, {
          onRun: (stage) => void this.runStage(stage),
        });
      case "verdicts":
        return verdictsView(state.gates, state.verdictNote, state.verdictError, {
          onNote: (note) => this.setVerdictNote(note),
          onSubmit: (gate, decision) => void this.submitVerdict(gate, decision),
        });
    }
  }
}
