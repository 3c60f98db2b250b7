/**
 * Theory editor: the current version text in a buffer, lint diagnostics
 * with line/column markers, the repair preview/apply actions, lineage,
 * and the reload-and-rebase dialog for stale saves.
 */

import { h, type VNode } from "../dom.js";
import type { EditorState } from "../state.js";
import type { Diagnostic } from "../types.js";

export interface EditorHandlers {
  onBuffer: (text: string) => void;
  onNote: (note: string) => void;
  onSave: () => void;
  onPreviewRepairs: () => void;
  onApplyRepairs: () => void;
  onRebase: () => void;
  onDiscard: () => void;
  onOpenVersion: (versionId: string) => void;
}

function diagnosticRow(diag: Diagnostic): VNode {
  const [line, column] = diag.span;
  return h(
    "li",
    { class: `diag ${diag.severity}`, "data-line": line, "data-column": column },
    h("span", { class: "where" }, `${line}:${column}`),
    " ",
    h("span", { class: "code" }, diag.code),
    " ",
    diag.message,
    diag.fixable ? h("span", { class: "fixable" }, " (fixable)") : null,
  );
}

function conflictDialog(editor: EditorState, handlers: EditorHandlers): VNode {
  const conflict = editor.conflict as NonNullable<EditorState["conflict"]>;
  return h(
    "div",
    { class: "conflict-dialog" },
    h("h4", null, "someone else saved first"),
    h(
      "p",
      null,
      `${conflict.message}; the server's latest is ${conflict.latestId}. `
        + "Rebase keeps your buffer and retargets it at the latest version; "
        + "discard reloads the latest text and drops your edits.",
    ),
    h("button", { class: "rebase", onclick: () => handlers.onRebase() }, "rebase onto latest"),
    h("button", { class: "discard", onclick: () => handlers.onDiscard() }, "discard my edits"),
  );
}

function lineageList(editor: EditorState, handlers: EditorHandlers): VNode {
  return h(
    "ol",
    { class: "lineage" },
    editor.lineage.map((meta) =>
      h(
        "li",
        { class: meta.version_id === editor.versionId ? "current" : "" },
        h(
          "button",
          { class: "link", onclick: () => handlers.onOpenVersion(meta.version_id) },
          `${meta.version_id} (${meta.origin})`,
        ),
        meta.author_note ? ` ${meta.author_note}` : "",
      ),
    ),
  );
}

export function editorView(editor: EditorState, handlers: EditorHandlers): VNode {
  if (editor.theory === null || editor.versionId === null) {
    return h("div", { class: "pane editor" }, h("p", { class: "empty" }, "open a theory from the statement browser"));
  }
  const theory = editor.theory;
  const dirty = editor.buffer !== theory.text;
  return h(
    "div",
    { class: "pane editor" },
    h(
      "div",
      { class: "editor-head" },
      h("h3", null, `${editor.versionId} (${theory.origin})`),
      theory.is_latest ? h("span", { class: "badge latest" }, "latest") : h("span", { class: "badge stale" }, "superseded"),
      dirty ? h("span", { class: "badge dirty" }, "modified") : null,
    ),
    editor.conflict ? conflictDialog(editor, handlers) : null,
    h("textarea", {
      class: "buffer",
      rows: 18,
      spellcheck: "false",
      value: editor.buffer,
      oninput: (event: Event) => handlers.onBuffer((event.target as HTMLTextAreaElement).value),
    }),
    h(
      "div",
      { class: "editor-actions" },
      h("input", {
        class: "author-note",
        placeholder: "author note (required for edits)",
        value: editor.authorNote,
        oninput: (event: Event) => handlers.onNote((event.target as HTMLInputElement).value),
      }),
      h("button", { class: "save", onclick: () => handlers.onSave() }, "save"),
      h("button", { class: "preview-repairs", onclick: () => handlers.onPreviewRepairs() }, "preview repairs"),
      editor.repairPlan !== null && editor.repairPlan.length > 0
        ? h("button", { class: "apply-repairs", onclick: () => handlers.onApplyRepairs() }, "apply repairs")
        : null,
    ),
    editor.status ? h("p", { class: "status" }, editor.status) : null,
    editor.repairPlan !== null
      ? h(
          "div",
          { class: "repair-plan" },
          h("h4", null, `planned repairs (${editor.repairPlan.length})`),
          editor.repairPlan.length === 0
            ? h("p", null, "nothing to repair in this version")
            : h(
                "ul",
                null,
                editor.repairPlan.map((edit) =>
                  h("li", { "data-rule": edit.ruleId }, `${edit.ruleId} @ ${edit.offset}`),
                ),
              ),
        )
      : null,
    h("h4", null, `diagnostics (${theory.diagnostics.length})`),
    theory.diagnostics.length === 0
      ? h("p", { class: "clean" }, "lint-clean")
      : h("ul", { class: "diagnostics" }, theory.diagnostics.map(diagnosticRow)),
    theory.check
      ? h(
          "p",
          { class: "check-line" },
          `last check (${theory.check.backend}): parse ${theory.check.parse_ok ? "ok" : "failed"}, `
            + `typecheck ${theory.check.typecheck_ok ? "ok" : "failed"}`,
        )
      : null,
    h("h4", null, "lineage"),
    lineageList(editor, handlers),
  );
}
