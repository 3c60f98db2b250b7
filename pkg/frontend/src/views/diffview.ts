/**
 * Before/after view for a pair of theory versions: the applied repair
 * rules (when the target version carries a repair log) above the
 * unified text diff.
 */

import { countChanges } from "../difftext.js";
import { h, type VNode } from "../dom.js";
import type { DiffState } from "../state.js";

export function diffView(diff: DiffState | null): VNode {
  if (diff === null) {
    return h("div", { class: "pane diff" }, h("p", { class: "empty" }, "no diff selected; apply repairs or pick two versions"));
  }
  const { added, removed } = countChanges(diff.rows);
  return h(
    "div",
    { class: "pane diff" },
    h("h3", null, `${diff.fromId} to ${diff.toId}`),
    h("p", { class: "diff-stats" }, `+${added} -${removed}`),
    diff.repairLog.length > 0
      ? h(
          "div",
          { class: "repair-log" },
          h("h4", null, `applied repairs (${diff.repairLog.length})`),
          h(
            "ol",
            null,
            diff.repairLog.map((entry) =>
              h(
                "li",
                { "data-rule": entry.rule_id },
                h("span", { class: "rule" }, entry.rule_id),
                ` pass ${entry.pass_number}: `,
                h("code", { class: "before" }, shorten(entry.text_before)),
                " to ",
                h("code", { class: "after" }, shorten(entry.text_after)),
              ),
            ),
          ),
        )
      : null,
    h(
      "pre",
      { class: "diff-body" },
      diff.rows.map((row) => h("div", { class: `diff-row ${row.kind}` }, row.text || " ")),
    ),
  );
}

function shorten(text: string, limit = 60): string {
  const flat = text.replace(/\n/g, "\\n");
  return flat.length > limit ? flat.slice(0, limit - 3) + "..." : flat;
}
