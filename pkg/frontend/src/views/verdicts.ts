/**
 * Verdict panel: approve or reject each pending gate. A note is
 * mandatory; the panel refuses to post without one.
 */

import { h, type VNode } from "../dom.js";

export interface VerdictHandlers {
  onNote: (note: string) => void;
  onSubmit: (gate: string, decision: "approve" | "reject") => void;
}

export function verdictsView(
  gates: string[],
  note: string,
  error: string | null,
  handlers: VerdictHandlers,
): VNode {
  if (gates.length === 0) {
    return h("div", { class: "pane verdicts" }, h("p", { class: "empty" }, "no gates are waiting on a verdict"));
  }
  return h(
    "div",
    { class: "pane verdicts" },
    gates.map((gate) =>
      h(
        "div",
        { class: "gate", "data-gate": gate },
        h("h3", null, `gate: ${gate}`),
        h("textarea", {
          class: "verdict-note",
          rows: 3,
          placeholder: "note (required)",
          value: note,
          oninput: (event: Event) => handlers.onNote((event.target as HTMLTextAreaElement).value),
        }),
        h(
          "div",
          { class: "verdict-actions" },
          h("button", { class: "approve", onclick: () => handlers.onSubmit(gate, "approve") }, "approve"),
          h("button", { class: "reject", onclick: () => handlers.onSubmit(gate, "reject") }, "reject"),
        ),
        error ? h("p", { class: "verdict-error" }, error) : null,
      ),
    ),
  );
}
