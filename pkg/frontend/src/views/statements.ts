/**
 * Statement browser: one row per extracted record, with kind, label,
 * terms, and a link to its latest theory version. Selecting a row shows
 * the statement body and the slice of the source document it came from.
 */

import { h, type VNode } from "../dom.js";
import type { SourceDocument, StatementRow } from "../types.js";

export interface StatementHandlers {
  onSelect: (stmtId: string) => void;
  onOpenTheory: (versionId: string) => void;
}

export function displayLabel(row: StatementRow): string {
  return row.label ?? row.stmt_id;
}

function termList(terms: string[]): string {
  return terms.length > 0 ? terms.join(", ") : "(none)";
}

function sourceSlice(doc: SourceDocument, span: [number, number]): string {
  return doc.raw_text.slice(span[0], span[1]);
}

function statementRow(row: StatementRow, selected: boolean, handlers: StatementHandlers): VNode {
  return h(
    "tr",
    {
      class: selected ? "stmt-row selected" : "stmt-row",
      "data-stmt": row.stmt_id,
      onclick: () => handlers.onSelect(row.stmt_id),
    },
    h("td", { class: "kind" }, row.kind),
    h("td", null, displayLabel(row)),
    h("td", null, row.canonical_term ?? ""),
    h("td", { class: "terms" }, termList(row.introduced_terms)),
    h("td", { class: "terms" }, termList(row.used_terms)),
    h(
      "td",
      null,
      row.latest_version
        ? h(
            "button",
            {
              class: "link",
              onclick: (event: Event) => {
                event.stopPropagation();
                handlers.onOpenTheory(row.latest_version as string);
              },
            },
            row.latest_version,
          )
        : "(not formalized)",
    ),
  );
}

function detailPane(
  row: StatementRow,
  doc: SourceDocument | null,
): VNode {
  const children: VNode[] = [
    h("h3", null, `${row.kind}: ${displayLabel(row)}`),
    h("pre", { class: "stmt-body" }, row.body_latex),
  ];
  if (row.abstraction) {
    children.push(h("h4", null, "abstraction"));
    children.push(h("p", { class: "abstraction" }, row.abstraction.text));
  }
  if (doc && doc.doc_id === row.doc_id) {
    children.push(h("h4", null, `source (${doc.title ?? doc.doc_id})`));
    children.push(h("pre", { class: "source-slice" }, sourceSlice(doc, row.source_span)));
  }
  return h("div", { class: "stmt-detail" }, children);
}

export function statementsView(
  statements: StatementRow[],
  selectedStmt: string | null,
  doc: SourceDocument | null,
  handlers: StatementHandlers,
): VNode {
  if (statements.length === 0) {
    return h("div", { class: "pane statements" }, h("p", { class: "empty" }, "no statements extracted yet; run ingest and extract"));
  }
  const selected = statements.find((s) => s.stmt_id === selectedStmt) ?? null;
  return h(
    "div",
    { class: "pane statements" },
    h(
      "table",
      { class: "stmt-table" },
      h(
        "thead",
        null,
        h(
          "tr",
          null,
          h("th", null, "kind"),
          h("th", null, "label"),
          h("th", null, "canonical term"),
          h("th", null, "introduces"),
          h("th", null, "uses"),
          h("th", null, "latest theory"),
        ),
      ),
      h(
        "tbody",
        null,
        statements.map((row) => statementRow(row, row.stmt_id === selectedStmt, handlers)),
      ),
    ),
    selected ? detailPane(selected, doc) : null,
  );
}
