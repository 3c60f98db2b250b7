/**
 * Concept graph rendered as an SVG DAG. Columns follow topo depth, so
 * definitions appear left of the statements that depend on them; edges
 * are labeled with the term that created the dependency.
 */

import { h, type VNode } from "../dom.js";
import { layeredLayout } from "../topo.js";
import type { ConceptGraph, StatementRow } from "../types.js";

export interface GraphHandlers {
  onSelect: (stmtId: string) => void;
}

const NODE_WIDTH = 150;
const NODE_HEIGHT = 40;

function nodeCaption(id: string, statements: StatementRow[]): string {
  const row = statements.find((s) => s.stmt_id === id);
  if (!row) {
    return id;
  }
  return row.canonical_term ?? row.label ?? row.stmt_id;
}

export function graphView(
  graph: ConceptGraph | null,
  statements: StatementRow[],
  handlers: GraphHandlers,
): VNode {
  if (graph === null) {
    return h("div", { class: "pane graph" }, h("p", { class: "empty" }, "the graph stage has not run yet"));
  }
  const layout = layeredLayout(graph.nodes, graph.edges, {
    columnWidth: NODE_WIDTH + 70,
    rowHeight: NODE_HEIGHT + 34,
  });

  const edgeNodes: VNode[] = [];
  for (const edge of graph.edges) {
    const from = layout.nodes.get(edge.from);
    const to = layout.nodes.get(edge.to);
    if (!from || !to) {
      continue;
    }
    const x1 = from.x + NODE_WIDTH;
    const y1 = from.y + NODE_HEIGHT / 2;
    const x2 = to.x;
    const y2 = to.y + NODE_HEIGHT / 2;
    edgeNodes.push(
      h("g", { class: "edge" },
        h("line", { x1, y1, x2, y2, "marker-end": "url(#arrow)" }),
        h(
          "text",
          { x: (x1 + x2) / 2, y: (y1 + y2) / 2 - 5, class: "edge-label" },
          edge.via_term,
        ),
      ),
    );
  }

  const nodeVNodes: VNode[] = [];
  for (const id of graph.nodes) {
    const placed = layout.nodes.get(id);
    if (!placed) {
      continue;
    }
    const row = statements.find((s) => s.stmt_id === id);
    const kindClass = row ? `node ${row.kind}` : "node";
    nodeVNodes.push(
      h(
        "g",
        { class: kindClass, "data-stmt": id, onclick: () => handlers.onSelect(id) },
        h("rect", { x: placed.x, y: placed.y, width: NODE_WIDTH, height: NODE_HEIGHT, rx: 6 }),
        h(
          "text",
          { x: placed.x + NODE_WIDTH / 2, y: placed.y + NODE_HEIGHT / 2 + 4, "text-anchor": "middle" },
          nodeCaption(id, statements),
        ),
      ),
    );
  }

  return h(
    "div",
    { class: "pane graph" },
    h(
      "svg",
      {
        width: layout.width + NODE_WIDTH,
        height: layout.height + NODE_HEIGHT,
        viewBox: `0 0 ${layout.width + NODE_WIDTH} ${layout.height + NODE_HEIGHT}`,
      },
      h(
        "defs",
        null,
        h(
          "marker",
          {
            id: "arrow",
            markerWidth: 8,
            markerHeight: 8,
            refX: 7,
            refY: 3,
            orient: "auto",
          },
          h("path", { d: "M0,0 L7,3 L0,6 z" }),
        ),
      ),
      edgeNodes,
      nodeVNodes,
    ),
  );
}
