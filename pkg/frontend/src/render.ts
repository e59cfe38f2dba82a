/** DOM builders for the graph canvas and the side panels.
 *
 * Every number shown here is read from the last evaluation response:
 * feasibility badges, risk badges, effective and struck-out authored
 * ratings, impacts, deltas, diagnostics.  Rendering is a full rebuild per
 * response; handlers are injected so this module stays free of state.
 */

import { NODE_H, NODE_W, Point, canvasSize } from "./layout.js";
import type {
  Evaluation,
  GraphDoc,
  GraphEdgeDoc,
  GraphNodeDoc,
  WhatIfResponse,
} from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface Handlers {
  toggleCountermeasure(id: string): void;
  editRating(target: string, attribute: string, rank: number): void;
  selectConsequence(id: string): void;
  nodeDragStart?(id: string, event: MouseEvent): void;
}

function svgEl<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string | number> = {},
): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    el.setAttribute(key, String(value));
  }
  return el;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = "",
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text) {
    node.textContent = text;
  }
  return node;
}

/** Rank scaled onto a five-step green-to-red palette. */
export function severityColor(rank: number, maxRank: number): string {
  const palette = ["#7cc07c", "#cbc25a", "#e0a23f", "#e06c3f", "#c03a3a"];
  if (maxRank <= 1) {
    return palette[0];
  }
  const index = Math.round(((rank - 1) / (maxRank - 1)) * (palette.length - 1));
  return palette[Math.max(0, Math.min(palette.length - 1, index))];
}

function maxRisk(evaluation: Evaluation): number {
  let max = 1;
  for (const cons of Object.values(evaluation.consequences)) {
    max = Math.max(max, cons.risk);
  }
  for (const cons of Object.values(evaluation.consequences)) {
    for (const edge of Object.values(cons.edges)) {
      max = Math.max(max, edge.risk);
    }
  }
  return Math.max(max, 4);
}

function maxFeasibility(evaluation: Evaluation): number {
  let max = 1;
  for (const node of Object.values(evaluation.nodes)) {
    max = Math.max(max, node.feasibility);
  }
  return Math.max(max, 4);
}

function center(point: Point): Point {
  return { x: point.x + NODE_W / 2, y: point.y + NODE_H / 2 };
}

function edgePath(from: Point, to: Point): string {
  return `M ${from.x} ${from.y + NODE_H / 2} L ${to.x} ${to.y - NODE_H / 2}`;
}

interface CriticalSet {
  nodes: Set<string>;
  edges: Set<string>;
}

function criticalSet(
  doc: GraphDoc,
  evaluation: Evaluation,
  selected: string | null,
): CriticalSet {
  const nodes = new Set<string>();
  const edges = new Set<string>();
  if (!selected || !evaluation.critical_paths[selected]) {
    return { nodes, edges };
  }
  const path = evaluation.critical_paths[selected];
  for (const id of path.nodes) {
    nodes.add(id);
  }
  const included = new Set(path.nodes);
  for (const edge of doc.edges) {
    if (edge.kind === "refinement" && included.has(edge.source) && included.has(edge.target)) {
      const result = evaluation.nodes[edge.source];
      const kids = result?.selected_children;
      if (kids === null || kids === undefined || kids.includes(edge.target)) {
        edges.add(edge.id);
      }
    }
    if (edge.kind === "consequence" && edge.source === selected
        && path.nodes[0] === edge.target) {
      edges.add(edge.id);
    }
  }
  return { nodes, edges };
}

function ratingsText(
  parent: SVGTextElement,
  authored: Record<string, number>,
  effective: Record<string, number>,
): void {
  const names = Object.keys(effective).sort();
  names.forEach((name, index) => {
    const short = name.slice(0, 1);
    const prefix = svgEl("tspan");
    prefix.textContent = `${index > 0 ? "  " : ""}${short}:`;
    parent.appendChild(prefix);
    if (authored[name] !== undefined && authored[name] !== effective[name]) {
      const struck = svgEl("tspan", { class: "authored-struck" });
      struck.textContent = String(authored[name]);
      parent.appendChild(struck);
      const now = svgEl("tspan");
      now.textContent = `→${effective[name]}`;
      parent.appendChild(now);
    } else {
      const now = svgEl("tspan");
      now.textContent = String(effective[name]);
      parent.appendChild(now);
    }
  });
}

export function renderGraph(
  host: HTMLElement,
  doc: GraphDoc,
  response: WhatIfResponse,
  positions: Map<string, Point>,
  selected: string | null,
  handlers: Handlers,
): void {
  const evaluation = response.evaluation;
  const critical = criticalSet(doc, evaluation, selected);
  const disabled = new Set(evaluation.overlay.disabled);
  const size = canvasSize(positions);

  host.textContent = "";
  const svg = svgEl("svg", {
    viewBox: `0 0 ${size.x} ${size.y}`,
    width: size.x,
    height: size.y,
    class: "graph-canvas",
  });
  host.appendChild(svg);

  const defs = svgEl("defs");
  const marker = svgEl("marker", {
    id: "arrow", viewBox: "0 0 10 10", refX: 9, refY: 5,
    markerWidth: 7, markerHeight: 7, orient: "auto-start-reverse",
  });
  marker.appendChild(svgEl("path", { d: "M 0 0 L 10 5 L 0 10 z", fill: "#667" }));
  defs.appendChild(marker);
  svg.appendChild(defs);

  const edgeLayer = svgEl("g");
  const nodeLayer = svgEl("g");
  svg.appendChild(edgeLayer);
  svg.appendChild(nodeLayer);

  const sortedEdges = [...doc.edges].sort((a, b) => a.id.localeCompare(b.id));
  for (const edge of sortedEdges) {
    renderEdge(edgeLayer, doc, edge, evaluation, positions, critical);
  }

  const sortedNodes = [...doc.nodes].sort((a, b) => a.id.localeCompare(b.id));
  for (const node of sortedNodes) {
    renderNode(nodeLayer, node, evaluation, positions, critical, disabled,
               handlers, response.delta);
  }
}

function sourceAnchor(
  doc: GraphDoc,
  edge: GraphEdgeDoc,
  positions: Map<string, Point>,
): Point | null {
  const direct = positions.get(edge.source);
  if (direct) {
    return center(direct);
  }
  // Countermeasure attached to a consequence edge: anchor at its midpoint.
  const protectedEdge = doc.edges.find((e) => e.id === edge.source);
  if (!protectedEdge) {
    return null;
  }
  const a = positions.get(protectedEdge.source);
  const b = positions.get(protectedEdge.target);
  if (!a || !b) {
    return null;
  }
  const ca = center(a);
  const cb = center(b);
  return { x: (ca.x + cb.x) / 2, y: (ca.y + cb.y) / 2 };
}

function renderEdge(
  layer: SVGGElement,
  doc: GraphDoc,
  edge: GraphEdgeDoc,
  evaluation: Evaluation,
  positions: Map<string, Point>,
  critical: CriticalSet,
): void {
  const from = sourceAnchor(doc, edge, positions);
  const to = positions.get(edge.target);
  if (!from || !to) {
    return;
  }
  const classes = ["edge", `edge-${edge.kind}`];
  if (critical.edges.has(edge.id)) {
    classes.push("critical");
  }
  const path = svgEl("path", {
    d: edgePath(from, center(to)),
    class: classes.join(" "),
    "marker-end": "url(#arrow)",
    "data-edge": edge.id,
  });
  layer.appendChild(path);

  if (edge.kind === "consequence") {
    const risk = evaluation.consequences[edge.source]?.edges[edge.id];
    if (risk) {
      const mid = { x: (from.x + to.x + NODE_W / 2) / 2, y: (from.y + to.y) / 2 };
      const label = svgEl("text", {
        x: mid.x, y: mid.y, class: "edge-label", "data-edge-impact": edge.id,
      });
      label.textContent =
        risk.impact === risk.impact_authored
          ? `Impact ${risk.impact}`
          : `Impact ${risk.impact_authored}→${risk.impact}`;
      layer.appendChild(label);
    }
  }
}

function renderNode(
  layer: SVGGElement,
  node: GraphNodeDoc,
  evaluation: Evaluation,
  positions: Map<string, Point>,
  critical: CriticalSet,
  disabled: Set<string>,
  handlers: Handlers,
  responseDelta?: WhatIfResponse["delta"],
): void {
  const position = positions.get(node.id);
  if (!position) {
    return;
  }
  const classes = ["node", `node-${node.kind}`];
  if (critical.nodes.has(node.id)) {
    classes.push("critical");
  }
  if (node.kind === "countermeasure" && disabled.has(node.id)) {
    classes.push("disabled");
  }
  const group = svgEl("g", {
    class: classes.join(" "),
    transform: `translate(${position.x} ${position.y})`,
    "data-node": node.id,
  });
  layer.appendChild(group);

  group.appendChild(svgEl("rect", {
    width: NODE_W, height: NODE_H,
    rx: node.kind === "consequence" ? 14 : 3,
    class: "node-box",
  }));

  const label = svgEl("text", {
    x: NODE_W / 2, y: 18, class: "node-label", "text-anchor": "middle",
  });
  label.textContent = node.label ?? node.id;
  group.appendChild(label);

  const result = evaluation.nodes[node.id];
  if (node.kind === "attack" && result) {
    const badge = svgEl("g", { class: "badge-feasibility" });
    badge.appendChild(svgEl("rect", {
      x: NODE_W - 34, y: -10, width: 38, height: 20, rx: 4,
      fill: severityColor(result.feasibility, maxFeasibility(evaluation)),
    }));
    const text = svgEl("text", {
      x: NODE_W - 15, y: 4, "text-anchor": "middle",
      class: "badge-text", "data-node-feas": node.id,
    });
    text.textContent = result.feasibility_label;
    badge.appendChild(text);
    group.appendChild(badge);

    if (result.connector && result.connector !== "OR") {
      const gate = svgEl("text", {
        x: 6, y: NODE_H - 7, class: "gate-glyph", "data-node-gate": node.id,
      });
      gate.textContent = `∧ ${result.connector}`;
      group.appendChild(gate);
    }
    if (result.ratings_effective) {
      const ratings = svgEl("text", {
        x: NODE_W / 2, y: 36, "text-anchor": "middle",
        class: "node-ratings", "data-node-ratings": node.id,
      });
      ratingsText(ratings, result.ratings_authored ?? {}, result.ratings_effective);
      group.appendChild(ratings);
    }
  }

  if (node.kind === "consequence") {
    const cons = evaluation.consequences[node.id];
    if (cons) {
      const delta = responseDelta?.consequences[node.id];
      const changed = delta !== undefined && delta.risk_before !== delta.risk_after;
      const badge = svgEl("g", {
        class: changed ? "badge-risk changed" : "badge-risk",
      });
      badge.appendChild(svgEl("rect", {
        x: NODE_W - 58, y: -12, width: 62, height: 22, rx: 4,
        fill: severityColor(cons.risk, maxRisk(evaluation)),
      }));
      const text = svgEl("text", {
        x: NODE_W - 27, y: 3, "text-anchor": "middle",
        class: "badge-text", "data-cons-risk": node.id,
      });
      text.textContent = cons.risk_label;
      badge.appendChild(text);
      group.appendChild(badge);
    }
    group.addEventListener("click", () => handlers.selectConsequence(node.id));
  }

  if (node.kind === "countermeasure") {
    const state = svgEl("text", {
      x: NODE_W / 2, y: 36, "text-anchor": "middle",
      class: "cm-state", "data-cm-state": node.id,
    });
    state.textContent = disabled.has(node.id) ? "disabled" : "active";
    group.appendChild(state);
    group.addEventListener("click", () => handlers.toggleCountermeasure(node.id));
  }

  if (node.kind !== "countermeasure" && handlers.nodeDragStart) {
    group.addEventListener("mousedown", (event) =>
      handlers.nodeDragStart!(node.id, event as MouseEvent));
  }
}

// ---------------------------------------------------------------------------
// Side panels
// ---------------------------------------------------------------------------

export function renderSidebar(
  host: HTMLElement,
  doc: GraphDoc,
  response: WhatIfResponse,
  selected: string | null,
  handlers: Handlers,
): void {
  host.textContent = "";
  const evaluation = response.evaluation;
  const disabled = new Set(evaluation.overlay.disabled);

  const cmSection = el("section", "panel panel-countermeasures");
  cmSection.appendChild(el("h2", "", "Countermeasures"));
  const cmList = el("ul", "cm-list");
  const countermeasures = doc.nodes
    .filter((n) => n.kind === "countermeasure")
    .sort((a, b) => a.id.localeCompare(b.id));
  if (countermeasures.length === 0) {
    cmList.appendChild(el("li", "empty", "none in this graph"));
  }
  for (const cm of countermeasures) {
    const item = el("li");
    const toggle = el("input") as HTMLInputElement;
    toggle.type = "checkbox";
    toggle.checked = !disabled.has(cm.id);
    toggle.dataset.cm = cm.id;
    toggle.addEventListener("change", () => handlers.toggleCountermeasure(cm.id));
    const labelEl = el("label", "", ` ${cm.label ?? cm.id}`);
    labelEl.prepend(toggle);
    item.appendChild(labelEl);
    cmSection.appendChild(item);
    cmList.appendChild(item);
  }
  cmSection.appendChild(cmList);
  host.appendChild(cmSection);

  host.appendChild(renderRatingsEditor(doc, response, handlers));
  host.appendChild(renderDeltaPanel(doc, response));

  if (evaluation.diagnostics.length > 0) {
    const diag = el("section", "panel panel-diagnostics");
    diag.appendChild(el("h2", "", "Diagnostics"));
    for (const line of evaluation.diagnostics) {
      diag.appendChild(el("p", "diagnostic", line));
    }
    host.appendChild(diag);
  }
}

function renderRatingsEditor(
  doc: GraphDoc,
  response: WhatIfResponse,
  handlers: Handlers,
): HTMLElement {
  const evaluation = response.evaluation;
  const section = el("section", "panel panel-ratings");
  section.appendChild(el("h2", "", "Ratings"));

  for (const node of [...doc.nodes].sort((a, b) => a.id.localeCompare(b.id))) {
    const result = evaluation.nodes[node.id];
    if (node.kind !== "attack" || !result?.ratings_effective) {
      continue;
    }
    const row = el("div", "rating-row");
    row.appendChild(el("span", "rating-node", node.label ?? node.id));
    for (const name of Object.keys(result.ratings_effective).sort()) {
      const field = el("label", "rating-field", `${name.slice(0, 1)} `);
      const input = el("input") as HTMLInputElement;
      input.type = "number";
      input.dataset.rating = `${node.id}.${name}`;
      const override = evaluation.overlay.rating_overrides[node.id]?.[name];
      input.value = String(override ?? result.ratings_authored?.[name] ?? "");
      input.addEventListener("change", () =>
        handlers.editRating(node.id, name, Number(input.value)));
      field.appendChild(input);
      row.appendChild(field);
    }
    section.appendChild(row);
  }

  const impactHeader = el("h2", "", "Impacts");
  section.appendChild(impactHeader);
  for (const edge of [...doc.edges].sort((a, b) => a.id.localeCompare(b.id))) {
    if (edge.kind !== "consequence") {
      continue;
    }
    const risk = evaluation.consequences[edge.source]?.edges[edge.id];
    if (!risk) {
      continue;
    }
    const row = el("div", "rating-row");
    const consequence = doc.nodes.find((n) => n.id === edge.source);
    row.appendChild(el("span", "rating-node", consequence?.label ?? edge.source));
    const field = el("label", "rating-field", "Impact ");
    const input = el("input") as HTMLInputElement;
    input.type = "number";
    input.dataset.impact = edge.id;
    const override = evaluation.overlay.rating_overrides[edge.id];
    const attrName = Object.keys(override ?? {})[0];
    input.value = String(attrName ? override![attrName] : risk.impact_authored);
    input.addEventListener("change", () =>
      handlers.editRating(edge.id, impactAttribute(edge), Number(input.value)));
    field.appendChild(input);
    row.appendChild(field);
    section.appendChild(row);
  }
  return section;
}

function impactAttribute(edge: GraphEdgeDoc): string {
  const names = Object.keys(edge.attributes ?? {});
  return names[0] ?? "Impact";
}

function renderDeltaPanel(doc: GraphDoc, response: WhatIfResponse): HTMLElement {
  const section = el("section", "panel panel-delta");
  section.appendChild(el("h2", "", "What-if versus baseline"));
  const labelOf = (id: string) =>
    doc.nodes.find((n) => n.id === id)?.label ?? id;

  for (const [consId, delta] of Object.entries(response.delta.consequences).sort()) {
    const changed = delta.risk_before !== delta.risk_after;
    const row = el("div", `delta-row${changed ? " changed" : ""}`);
    row.dataset.deltaCons = consId;
    row.textContent =
      `${labelOf(consId)}: ${delta.risk_label_before} → ${delta.risk_label_after}`;
    section.appendChild(row);
  }
  const nodeEntries = Object.entries(response.delta.nodes).sort();
  for (const [nodeId, delta] of nodeEntries) {
    const row = el("div", "delta-row delta-node changed");
    row.dataset.deltaNode = nodeId;
    row.textContent =
      `${labelOf(nodeId)}: feasibility ${delta.feasibility_before} → ` +
      `${delta.feasibility_after}`;
    section.appendChild(row);
  }
  if (nodeEntries.length === 0) {
    section.appendChild(el("div", "delta-row empty", "no feasibility changes"));
  }
  return section;
}
