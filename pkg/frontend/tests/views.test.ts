import { describe, expect, test } from "vitest";

import { findNodes, textOf, type VNode } from "../src/dom.js";
import type { EditorState } from "../src/state.js";
import { diffView } from "../src/views/diffview.js";
import { editorView, type EditorHandlers } from "../src/views/editor.js";
import { graphView } from "../src/views/graph.js";
import { runsView } from "../src/views/runs.js";
import { statementsView } from "../src/views/statements.js";
import { verdictsView } from "../src/views/verdicts.js";
import { parseUnifiedDiff } from "../src/difftext.js";
import { diag, diamondGraph, fiveStatements, repairEntries, theory } from "./fixtures.js";

const noopStatementHandlers = { onSelect: () => {}, onOpenTheory: () => {} };

function editorState(overrides: Partial<EditorState> = {}): EditorState {
  const detail = theory();
  return {
    versionId: detail.version_id,
    theory: detail,
    lineage: [detail],
    buffer: detail.text,
    authorNote: "",
    conflict: null,
    repairPlan: null,
    status: "",
    ...overrides,
  };
}

function editorHandlers(overrides: Partial<EditorHandlers> = {}): EditorHandlers {
  return {
    onBuffer: () => {},
    onNote: () => {},
    onSave: () => {},
    onPreviewRepairs: () => {},
    onApplyRepairs: () => {},
    onRebase: () => {},
    onDiscard: () => {},
    onOpenVersion: () => {},
    ...overrides,
  };
}

describe("statementsView", () => {
  test("renders one row per statement", () => {
    const view = statementsView(fiveStatements(), null, null, noopStatementHandlers);
    const rows = findNodes(view, (n) => n.tag === "tr" && String(n.props.class ?? "").includes("stmt-row"));
    expect(rows.length).toBe(5);
  });

  test("an unlabeled statement falls back to its id", () => {
    const view = statementsView(fiveStatements(), null, null, noopStatementHandlers);
    expect(textOf(view)).toContain("stmt-000000000005");
  });

  test("selecting a row goes through the handler", () => {
    let picked = "";
    const view = statementsView(
      fiveStatements(),
      null,
      null,
      { ...noopStatementHandlers, onSelect: (id) => (picked = id) },
    );
    const rows = findNodes(view, (n) => n.tag === "tr" && n.props["data-stmt"] === "stmt-000000000002");
    (rows[0].props.onclick as () => void)();
    expect(picked).toBe("stmt-000000000002");
  });

  test("empty corpus shows the hint instead of a table", () => {
    const view = statementsView([], null, null, noopStatementHandlers);
    expect(findNodes(view, (n) => n.tag === "table").length).toBe(0);
    expect(textOf(view)).toContain("run ingest and extract");
  });

  test("the selected statement exposes its source slice", () => {
    const statements = fiveStatements();
    const doc = {
      doc_id: "doc-1",
      format: "latex" as const,
      raw_text: "0123456789abcdef",
      title: "summary",
      spans: [],
    };
    const view = statementsView(statements, "stmt-000000000001", doc, noopStatementHandlers);
    const slices = findNodes(view, (n) => String(n.props.class ?? "") === "source-slice");
    expect(slices.length).toBe(1);
    expect(textOf(slices[0])).toBe("0123456789");
  });
});

describe("graphView", () => {
  test("renders every node and labeled edge", () => {
    const view = graphView(diamondGraph(), fiveStatements(), { onSelect: () => {} });
    expect(findNodes(view, (n) => n.tag === "rect").length).toBe(5);
    expect(findNodes(view, (n) => n.tag === "line").length).toBe(6);
    expect(textOf(view)).toContain("effective symbolic space");
  });

  test("missing graph explains itself", () => {
    const view = graphView(null, [], { onSelect: () => {} });
    expect(textOf(view)).toContain("graph stage has not run");
  });
});

describe("editorView", () => {
  test("shows diagnostics with line and column markers", () => {
    const detail = theory({
      diagnostics: [diag(), diag({ code: "E_DUP_DECL", severity: "error", span: [4, 3, 1], message: "dup" })],
    });
    const view = editorView(editorState({ theory: detail }), editorHandlers());
    const items = findNodes(view, (n) => String(n.props.class ?? "").startsWith("diag "));
    expect(items.length).toBe(2);
    expect(textOf(items[1])).toContain("3:5");
    const errors = findNodes(view, (n) => String(n.props.class ?? "") === "diag error");
    expect(textOf(errors[0])).toContain("4:3");
    expect(textOf(errors[0])).toContain("E_DUP_DECL");
  });

  test("a modified buffer is flagged", () => {
    const view = editorView(editorState({ buffer: "changed text" }), editorHandlers());
    const badges = findNodes(view, (n) => String(n.props.class ?? "") === "badge dirty");
    expect(badges.length).toBe(1);
  });

  test("conflict state brings up the rebase dialog", () => {
    const view = editorView(
      editorState({ conflict: { latestId: "thv-cccccccccccccccc", message: "not latest" } }),
      editorHandlers(),
    );
    const dialog = findNodes(view, (n) => String(n.props.class ?? "") === "conflict-dialog");
    expect(dialog.length).toBe(1);
    expect(textOf(dialog[0])).toContain("thv-cccccccccccccccc");
    expect(findNodes(dialog[0], (n) => n.tag === "button").length).toBe(2);
  });

  test("apply button appears only with a non-empty plan", () => {
    const planless = editorView(editorState({ repairPlan: [] }), editorHandlers());
    expect(findNodes(planless, (n) => String(n.props.class ?? "") === "apply-repairs").length).toBe(0);
    expect(textOf(planless)).toContain("nothing to repair");

    const planned = editorView(
      editorState({
        repairPlan: [{ versionId: "thv-aaaaaaaaaaaaaaaa", ruleId: "rewrite_header", offset: 0 }],
      }),
      editorHandlers(),
    );
    expect(findNodes(planned, (n) => String(n.props.class ?? "") === "apply-repairs").length).toBe(1);
  });

  test("no open theory gives the empty hint", () => {
    const view = editorView(editorState({ versionId: null, theory: null }), editorHandlers());
    expect(textOf(view)).toContain("open a theory");
  });
});

describe("diffView", () => {
  test("renders repair entries and colored rows", () => {
    const rows = parseUnifiedDiff("--- a\n+++ b\n@@ -1 +1 @@\n-x\n+y\n");
    const view = diffView({
      fromId: "thv-aaaaaaaaaaaaaaaa",
      toId: "thv-bbbbbbbbbbbbbbbb",
      rows,
      repairLog: repairEntries(),
    });
    const entries = findNodes(view, (n) => n.tag === "li");
    expect(entries.length).toBe(3);
    expect(textOf(view)).toContain("rename_reference");
    expect(findNodes(view, (n) => String(n.props.class ?? "") === "diff-row add").length).toBe(1);
    expect(findNodes(view, (n) => String(n.props.class ?? "") === "diff-row del").length).toBe(1);
    expect(textOf(view)).toContain("+1 -1");
  });

  test("without a selection it explains how to get one", () => {
    expect(textOf(diffView(null))).toContain("apply repairs or pick two versions");
  });
});

describe("runsView", () => {
  test("stage buttons lock while a run is active", () => {
    const idle = runsView({ entries: [], active: null }, [], { onRun: () => {} });
    const idleButtons = findNodes(idle, (n) => n.tag === "button");
    expect(idleButtons.length).toBe(10);
    expect(idleButtons.every((b) => !b.props.disabled)).toBe(true);

    const busy = runsView(
      { entries: [], active: { run_id: "run-0004-merge", stage: "merge", status: "running" } },
      [],
      { onRun: () => {} },
    );
    const busyButtons = findNodes(busy, (n) => n.tag === "button");
    expect(busyButtons.every((b) => b.props.disabled === true)).toBe(true);
    expect(textOf(busy)).toContain("running run-0004-merge");
  });

  test("finished runs list their notes and pending gates are hinted", () => {
    const view = runsView(
      {
        entries: [
          { run_id: "run-0007-merge", stage: "merge", status: "needs_human", notes: "merge requires an approval verdict (gate: merge)" },
        ],
        active: null,
      },
      ["merge"],
      { onRun: () => {} },
    );
    expect(textOf(view)).toContain("needs_human");
    expect(textOf(view)).toContain("waiting on verdicts: merge");
  });

  test("clicking a stage button dispatches its name", () => {
    let ran = "";
    const view = runsView({ entries: [], active: null }, [], { onRun: (stage) => (ran = stage) });
    const prove = findNodes(view, (n) => n.props["data-stage"] === "prove");
    (prove[0].props.onclick as () => void)();
    expect(ran).toBe("prove");
  });
});

describe("verdictsView", () => {
  test("renders a panel per pending gate and dispatches decisions", () => {
    let got: [string, string] | null = null;
    const view = verdictsView(["merge"], "looks right", null, {
      onNote: () => {},
      onSubmit: (gate, decision) => (got = [gate, decision]),
    });
    const approve = findNodes(view, (n) => String(n.props.class ?? "") === "approve");
    (approve[0].props.onclick as () => void)();
    expect(got).toEqual(["merge", "approve"]);
  });

  test("a validation error is shown next to the gate", () => {
    const view = verdictsView(["merge"], "", "a note is required before recording a verdict", {
      onNote: () => {},
      onSubmit: () => {},
    });
    expect(textOf(view)).toContain("a note is required");
  });

  test("no pending gates reads as such", () => {
    const view = verdictsView([], "", null, { onNote: () => {}, onSubmit: () => {} });
    expect(textOf(view)).toContain("no gates are waiting");
  });
});

describe("vnode helpers", () => {
  test("findNodes walks nested children", () => {
    const view = statementsView(fiveStatements(), null, null, noopStatementHandlers);
    const buttons = findNodes(view as VNode, (n) => n.tag === "button");
    expect(buttons.length).toBe(5);
  });
});
