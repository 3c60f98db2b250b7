/**
 * Split a unified diff into typed rows for rendering.
 */

export type DiffRowKind = "meta" | "hunk" | "add" | "del" | "context";

export interface DiffRow {
  kind: DiffRowKind;
  text: string;
}

export function parseUnifiedDiff(diff: string): DiffRow[] {
  if (!diff) {
    return [];
  }
  const lines = diff.split("\n");
  if (lines.length > 0 && lines[lines.length - 1] === "") {
    lines.pop();
  }
  const rows: DiffRow[] = [];
  for (const line of lines) {
    let kind: DiffRowKind;
    if (line.startsWith("---") || line.startsWith("+++") || line.startsWith("\\")) {
      kind = "meta";
    } else if (line.startsWith("@@")) {
      kind = "hunk";
    } else if (line.startsWith("+")) {
      kind = "add";
    } else if (line.startsWith("-")) {
      kind = "del";
    } else {
      kind = "context";
    }
    rows.push({ kind, text: line });
  }
  return rows;
}

export function countChanges(rows: DiffRow[]): { added: number; removed: number } {
  let added = 0;
  let removed = 0;
  for (const row of rows) {
    if (row.kind === "add") {
      added += 1;
    } else if (row.kind === "del") {
      removed += 1;
    }
  }
  return { added, removed };
}
