/**
 * Minimal virtual-node layer.
 *
 * Views build plain VNode trees so unit tests can inspect them without a
 * browser; `renderTo` materializes a tree into real DOM elements.
 */

export type Props = Record<string, unknown>;

export interface VNode {
  tag: string;
  props: Props;
  children: VChild[];
}

export type VChild = VNode | string;

type ChildInput = VChild | VChild[] | null | undefined | false;

const SVG_TAGS = new Set([
  "svg",
  "g",
  "rect",
  "line",
  "circle",
  "path",
  "text",
  "polyline",
  "title",
  "marker",
  "defs",
]);

const SVG_NS = "http://www.w3.org/2000/svg";

export function h(tag: string, props?: Props | null, ...children: ChildInput[]): VNode {
  const flat: VChild[] = [];
  for (const child of children) {
    if (child === null || child === undefined || child === false) {
      continue;
    }
    if (Array.isArray(child)) {
      for (const grand of child) {
        if (grand !== null && grand !== undefined) {
          flat.push(grand);
        }
      }
    } else {
      flat.push(child);
    }
  }
  return { tag, props: props ?? {}, children: flat };
}

function build(node: VChild): Node {
  if (typeof node === "string") {
    return document.createTextNode(node);
  }
  const element = SVG_TAGS.has(node.tag)
    ? document.createElementNS(SVG_NS, node.tag)
    : document.createElement(node.tag);
  for (const [key, value] of Object.entries(node.props)) {
    if (value === null || value === undefined || value === false) {
      continue;
    }
    if (key.startsWith("on") && typeof value === "function") {
      element.addEventListener(key.slice(2), value as EventListener);
    } else if (key === "value" && element instanceof HTMLTextAreaElement) {
      element.value = String(value);
    } else if (key === "value" && element instanceof HTMLInputElement) {
      element.value = String(value);
    } else if (value === true) {
      element.setAttribute(key, "");
    } else {
      element.setAttribute(key, String(value));
    }
  }
  for (const child of node.children) {
    element.appendChild(build(child));
  }
  return element;
}

/** Replace the children of `target` with the rendered tree. */
export function renderTo(target: Element, node: VNode): void {
  target.replaceChildren(build(node));
}

/** Depth-first search over a VNode tree; strings are skipped. */
export function findNodes(root: VNode, predicate: (node: VNode) => boolean): VNode[] {
  const hits: VNode[] = [];
  const stack: VNode[] = [root];
  while (stack.length > 0) {
    const node = stack.pop() as VNode;
    if (predicate(node)) {
      hits.push(node);
    }
    for (const child of node.children) {
      if (typeof child !== "string") {
        stack.push(child);
      }
    }
  }
  return hits;
}

/** Concatenated text content of a VNode tree. */
export function textOf(node: VChild): string {
  if (typeof node === "string") {
    return node;
  }
  return node.children.map(textOf).join("");
}
