/** Layered DAG auto-layout.
 *
 * Consequences sit on the top layer, attack nodes on layers below by
 * refinement depth, countermeasures one layer under their target.  Stored
 * display hints ({x, y} numbers) win over computed positions; everything
 * else about the graph's meaning comes from the server, this module only
 * places boxes.
 */

import type { GraphDoc } from "./types.js";

export interface Point {
  x: number;
  y: number;
}

export const NODE_W = 168;
export const NODE_H = 54;
export const GAP_X = 26;
export const GAP_Y = 64;

export function layerOf(doc: GraphDoc): Map<string, number> {
  const layers = new Map<string, number>();
  const refinementChildren = new Map<string, string[]>();
  const hasParent = new Set<string>();
  for (const edge of doc.edges) {
    if (edge.kind === "refinement") {
      const kids = refinementChildren.get(edge.source) ?? [];
      kids.push(edge.target);
      refinementChildren.set(edge.source, kids);
      hasParent.add(edge.target);
    }
  }

  for (const node of doc.nodes) {
    if (node.kind === "consequence") {
      layers.set(node.id, 0);
    }
  }
  // Topmost attack nodes start below the consequences; children go a
  // layer under their deepest parent.
  const roots = doc.nodes.filter(
    (n) => n.kind === "attack" && !hasParent.has(n.id),
  );
  const queue: string[] = [];
  for (const root of roots) {
    layers.set(root.id, 1);
    queue.push(root.id);
  }
  while (queue.length > 0) {
    const current = queue.shift()!;
    const depth = layers.get(current)!;
    for (const child of refinementChildren.get(current) ?? []) {
      if ((layers.get(child) ?? 0) < depth + 1) {
        layers.set(child, depth + 1);
        queue.push(child);
      }
    }
  }
  for (const edge of doc.edges) {
    if (edge.kind === "countermeasure") {
      const anchor = layers.get(edge.source) ?? layers.get(targetOfEdgeId(doc, edge.source) ?? "") ?? 1;
      layers.set(edge.target, anchor + 1);
    }
  }
  return layers;
}

/** For countermeasures attached to a consequence edge: the edge's target node. */
function targetOfEdgeId(doc: GraphDoc, edgeId: string): string | null {
  const edge = doc.edges.find((e) => e.id === edgeId);
  return edge ? edge.target : null;
}

function storedPosition(node: { display?: Record<string, unknown> }): Point | null {
  const display = node.display;
  if (display && typeof display.x === "number" && typeof display.y === "number") {
    return { x: display.x, y: display.y };
  }
  return null;
}

export function computeLayout(doc: GraphDoc): Map<string, Point> {
  const layers = layerOf(doc);
  const byLayer = new Map<number, string[]>();
  for (const node of doc.nodes) {
    const layer = layers.get(node.id) ?? 1;
    const row = byLayer.get(layer) ?? [];
    row.push(node.id);
    byLayer.set(layer, row);
  }
  const widest = Math.max(
    1,
    ...Array.from(byLayer.values(), (row) => row.length),
  );
  const totalWidth = widest * (NODE_W + GAP_X);

  const positions = new Map<string, Point>();
  for (const [layer, row] of byLayer) {
    row.sort();
    const span = row.length * (NODE_W + GAP_X);
    const offset = (totalWidth - span) / 2;
    row.forEach((id, index) => {
      positions.set(id, {
        x: offset + index * (NODE_W + GAP_X) + GAP_X / 2,
        y: layer * (NODE_H + GAP_Y) + GAP_Y / 2,
      });
    });
  }
  for (const node of doc.nodes) {
    const stored = storedPosition(node);
    if (stored) {
      positions.set(node.id, stored);
    }
  }
  return positions;
}

export function canvasSize(positions: Map<string, Point>): Point {
  let x = NODE_W + GAP_X;
  let y = NODE_H + GAP_Y;
  for (const p of positions.values()) {
    x = Math.max(x, p.x + NODE_W + GAP_X);
    y = Math.max(y, p.y + NODE_H + GAP_Y);
  }
  return { x, y };
}
