/** Thin client for the evaluation service; the fetch function is
 * injectable so tests can intercept and record responses. */

import type { GraphDoc, GraphListing, OverlayDoc, WhatIfResponse } from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(public status: number, public code: string, message: string) {
    super(message);
  }
}

async function check(response: Response): Promise<Response> {
  if (response.ok) {
    return response;
  }
  let code = "HTTP_" + response.status;
  let message = response.statusText;
  try {
    const body = (await response.json()) as { code?: string; message?: string };
    code = body.code ?? code;
    message = body.message ?? message;
  } catch {
    // non-JSON error body: keep the status text
  }
  throw new ApiError(response.status, code, message);
}

export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async get<T>(path: string): Promise<T> {
    const response = await check(await this.fetchFn(this.base + path));
    return (await response.json()) as T;
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const response = await check(
      await this.fetchFn(this.base + path, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(body),
      }),
    );
    return (await response.json()) as T;
  }

  listGraphs(): Promise<GraphListing[]> {
    return this.get("/api/v1/graphs");
  }

  getGraph(id: string): Promise<GraphDoc> {
    return this.get(`/api/v1/graphs/${encodeURIComponent(id)}`);
  }

  saveGraph(id: string, doc: GraphDoc): Promise<{ saved: string }> {
    return this.post(`/api/v1/graphs/${encodeURIComponent(id)}`, doc);
  }

  whatIf(request: {
    graph_id: string;
    overlay: OverlayDoc;
    baseline?: boolean;
    session?: string;
  }): Promise<WhatIfResponse> {
    return this.post("/api/v1/whatif", request);
  }
}
