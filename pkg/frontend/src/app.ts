/** Application wiring: load a graph, evaluate through the service, and
 * re-render panels from each response.  Optimistic updates are off by
 * design: the DOM changes only when a /whatif response arrives. */

import { ApiClient } from "./api.js";
import { Point, computeLayout } from "./layout.js";
import { Handlers, renderGraph, renderSidebar } from "./render.js";
import { OverlayState, RequestQueue } from "./state.js";
import type { GraphDoc, OverlayDoc, WhatIfResponse } from "./types.js";

export class App {
  readonly overlay = new OverlayState();
  lastResponse: WhatIfResponse | null = null;
  graphId: string | null = null;

  private doc: GraphDoc | null = null;
  private positions = new Map<string, Point>();
  private selected: string | null = null;
  private session: string | undefined;
  private queue: RequestQueue<OverlayDoc>;
  private dragging: { id: string; dx: number; dy: number } | null = null;
  private layoutDirty = false;

  constructor(
    private readonly root: HTMLElement,
    private readonly client: ApiClient,
  ) {
    this.queue = new RequestQueue(async (overlay) => {
      if (!this.graphId) {
        return;
      }
      const response = await this.client.whatIf({
        graph_id: this.graphId,
        overlay,
        baseline: true,
        session: this.session,
      });
      this.session = response.session;
      this.lastResponse = response;
      this.render();
    });
    this.scaffold();
  }

  async start(): Promise<void> {
    const graphs = await this.client.listGraphs();
    const select = this.root.querySelector("#graph-select") as HTMLSelectElement;
    select.textContent = "";
    for (const graph of graphs) {
      const option = document.createElement("option");
      option.value = graph.id;
      option.textContent = graph.title || graph.id;
      select.appendChild(option);
    }
    select.addEventListener("change", () => void this.loadGraph(select.value));
    const requested = new URLSearchParams(window.location.search).get("graph");
    const initial =
      requested && graphs.some((g) => g.id === requested)
        ? requested
        : graphs[0]?.id;
    if (initial) {
      select.value = initial;
      await this.loadGraph(initial);
    } else {
      this.canvasHost().textContent = "";
      this.canvasHost().appendChild(emptyState());
    }
  }

  async loadGraph(id: string): Promise<void> {
    this.graphId = id;
    this.doc = await this.client.getGraph(id);
    this.positions = computeLayout(this.doc);
    this.overlay.reset();
    this.selected = null;
    this.session = undefined;
    this.layoutDirty = false;
    await this.queue.submit(this.overlay.toDoc());
    await this.queue.idle();
  }

  /** Resolves when no evaluation request is running or queued. */
  idle(): Promise<void> {
    return this.queue.idle();
  }

  toggleCountermeasure(id: string): Promise<void> {
    this.overlay.toggle(id);
    return this.queue.submit(this.overlay.toDoc());
  }

  editRating(target: string, attribute: string, rank: number): Promise<void> {
    this.overlay.setOverride(target, attribute, Number.isFinite(rank) ? rank : null);
    return this.queue.submit(this.overlay.toDoc());
  }

  selectConsequence(id: string): void {
    this.selected = this.selected === id ? null : id;
    this.render();
  }

  async saveLayout(): Promise<void> {
    if (!this.doc || !this.graphId || !this.layoutDirty) {
      return;
    }
    const copy: GraphDoc = JSON.parse(JSON.stringify(this.doc));
    for (const node of copy.nodes) {
      const point = this.positions.get(node.id);
      if (point) {
        node.display = { ...(node.display ?? {}), x: point.x, y: point.y };
      }
    }
    await this.client.saveGraph(this.graphId, copy);
    this.doc = copy;
    this.layoutDirty = false;
    this.render();
  }

  // -- internals ---------------------------------------------------------

  private scaffold(): void {
    this.root.textContent = "";
    const header = document.createElement("header");
    header.className = "toolbar";
    header.innerHTML =
      '<h1>riskgraph</h1>' +
      '<select id="graph-select" aria-label="graph"></select>' +
      '<button id="save-layout" type="button">Save layout</button>' +
      '<span class="hint">click a consequence to highlight its critical path</span>';
    const main = document.createElement("main");
    main.className = "workspace";
    const canvas = document.createElement("div");
    canvas.id = "canvas";
    const sidebar = document.createElement("aside");
    sidebar.id = "sidebar";
    main.appendChild(canvas);
    main.appendChild(sidebar);
    this.root.appendChild(header);
    this.root.appendChild(main);
    (header.querySelector("#save-layout") as HTMLButtonElement)
      .addEventListener("click", () => void this.saveLayout());

    window.addEventListener("mousemove", (event) => this.drag(event));
    window.addEventListener("mouseup", () => (this.dragging = null));
  }

  private canvasHost(): HTMLElement {
    return this.root.querySelector("#canvas") as HTMLElement;
  }

  private handlers(): Handlers {
    return {
      toggleCountermeasure: (id) => void this.toggleCountermeasure(id),
      editRating: (target, attribute, rank) =>
        void this.editRating(target, attribute, rank),
      selectConsequence: (id) => this.selectConsequence(id),
      nodeDragStart: (id, event) => {
        const point = this.positions.get(id);
        if (point) {
          this.dragging = {
            id, dx: event.clientX - point.x, dy: event.clientY - point.y,
          };
        }
      },
    };
  }

  private drag(event: MouseEvent): void {
    if (!this.dragging) {
      return;
    }
    this.positions.set(this.dragging.id, {
      x: event.clientX - this.dragging.dx,
      y: event.clientY - this.dragging.dy,
    });
    this.layoutDirty = true;
    this.render();
  }

  private render(): void {
    if (!this.doc || !this.lastResponse) {
      return;
    }
    renderGraph(this.canvasHost(), this.doc, this.lastResponse,
                this.positions, this.selected, this.handlers());
    renderSidebar(this.root.querySelector("#sidebar") as HTMLElement,
                  this.doc, this.lastResponse, this.selected, this.handlers());
  }
}

function emptyState(): HTMLElement {
  const panel = document.createElement("div");
  panel.className = "empty-state";
  panel.textContent =
    "No graphs found. Start the service with --graph-dir pointing at a " +
    "directory of .rag files.";
  return panel;
}
