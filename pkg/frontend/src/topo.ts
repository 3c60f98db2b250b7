/**
 * Layered layout for the concept graph: nodes are binned into columns by
 * their longest distance from a root, so every edge points rightward and
 * prerequisites always sit left of the statements that use them.
 */

export interface LayoutOptions {
  columnWidth?: number;
  rowHeight?: number;
  marginX?: number;
  marginY?: number;
}

export interface PlacedNode {
  id: string;
  depth: number;
  lane: number;
  x: number;
  y: number;
}

export interface GraphLayout {
  nodes: Map<string, PlacedNode>;
  depthCount: number;
  width: number;
  height: number;
}

interface EdgeLike {
  from: string;
  to: string;
}

/**
 * Longest-path layering via Kahn's algorithm. Nodes left over after the
 * queue drains (a cycle, which a well-formed concept graph never has)
 * are parked one column past the deepest settled node.
 */
export function layerDepths(nodes: string[], edges: EdgeLike[]): Map<string, number> {
  const indegree = new Map<string, number>();
  const outgoing = new Map<string, string[]>();
  for (const id of nodes) {
    indegree.set(id, 0);
    outgoing.set(id, []);
  }
  for (const edge of edges) {
    if (!indegree.has(edge.from) || !indegree.has(edge.to)) {
      continue;
    }
    indegree.set(edge.to, (indegree.get(edge.to) as number) + 1);
    (outgoing.get(edge.from) as string[]).push(edge.to);
  }

  const depth = new Map<string, number>();
  const queue: string[] = [];
  for (const id of nodes) {
    if (indegree.get(id) === 0) {
      depth.set(id, 0);
      queue.push(id);
    }
  }
  let head = 0;
  while (head < queue.length) {
    const id = queue[head];
    head += 1;
    const here = depth.get(id) as number;
    for (const next of outgoing.get(id) as string[]) {
      const proposed = here + 1;
      if ((depth.get(next) ?? -1) < proposed) {
        depth.set(next, proposed);
      }
      indegree.set(next, (indegree.get(next) as number) - 1);
      if (indegree.get(next) === 0) {
        queue.push(next);
      }
    }
  }

  let deepest = 0;
  for (const d of depth.values()) {
    deepest = Math.max(deepest, d);
  }
  for (const id of nodes) {
    if (!depth.has(id)) {
      depth.set(id, deepest + 1);
    }
  }
  return depth;
}

export function layeredLayout(
  nodes: string[],
  edges: EdgeLike[],
  options: LayoutOptions = {},
): GraphLayout {
  const columnWidth = options.columnWidth ?? 200;
  const rowHeight = options.rowHeight ?? 72;
  const marginX = options.marginX ?? 24;
  const marginY = options.marginY ?? 24;

  const depth = layerDepths(nodes, edges);
  const laneCounters = new Map<number, number>();
  const placed = new Map<string, PlacedNode>();
  let depthCount = 0;
  let maxLane = 0;

  // input order decides lane order inside a column, keeping the layout stable
  for (const id of nodes) {
    const d = depth.get(id) as number;
    const lane = laneCounters.get(d) ?? 0;
    laneCounters.set(d, lane + 1);
    placed.set(id, {
      id,
      depth: d,
      lane,
      x: marginX + d * columnWidth,
      y: marginY + lane * rowHeight,
    });
    depthCount = Math.max(depthCount, d + 1);
    maxLane = Math.max(maxLane, lane + 1);
  }

  return {
    nodes: placed,
    depthCount,
    width: marginX * 2 + Math.max(depthCount - 1, 0) * columnWidth + 160,
    height: marginY * 2 + Math.max(maxLane - 1, 0) * rowHeight + 48,
  };
}
