/**
 * Run console: one button per pipeline stage, a live indicator for the
 * run being polled, and the list of finished runs with their notes.
 */

import { h, type VNode } from "../dom.js";
import type { RunConsoleState } from "../state.js";
import { STAGE_NAMES, type RunRecord } from "../types.js";

export interface RunHandlers {
  onRun: (stage: string) => void;
}

function runLine(record: RunRecord): VNode {
  const notes = record.notes ? ` (${record.notes})` : "";
  return h(
    "li",
    { class: `run ${record.status}`, "data-run": record.run_id },
    h("span", { class: "run-id" }, record.run_id),
    ` ${record.stage}: ${record.status}${notes}`,
  );
}

export function runsView(runs: RunConsoleState, gates: string[], handlers: RunHandlers): VNode {
  const busy = runs.active !== null;
  return h(
    "div",
    { class: "pane runs" },
    h(
      "div",
      { class: "stage-buttons" },
      STAGE_NAMES.map((stage) =>
        h(
          "button",
          {
            class: "stage",
            "data-stage": stage,
            disabled: busy,
            onclick: () => handlers.onRun(stage),
          },
          stage,
        ),
      ),
    ),
    busy
      ? h(
          "p",
          { class: "active-run" },
          `running ${(runs.active as RunRecord).run_id} (${(runs.active as RunRecord).stage})`,
        )
      : null,
    gates.length > 0
      ? h("p", { class: "gates-hint" }, `waiting on verdicts: ${gates.join(", ")}`)
      : null,
    h(
      "ul",
      { class: "run-log" },
      runs.entries.map(runLine),
    ),
  );
}
