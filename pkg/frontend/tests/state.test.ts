import { describe, expect, it } from "vitest";

import { OverlayState, RequestQueue } from "../src/state.js";
import type { OverlayDoc } from "../src/types.js";

describe("OverlayState", () => {
  it("toggling twice returns to the empty overlay", () => {
    const state = new OverlayState();
    state.toggle("firewall");
    expect(state.toDoc().disabled).toEqual(["firewall"]);
    state.toggle("firewall");
    expect(state.toDoc()).toEqual({ disabled: [], rating_overrides: {} });
  });

  it("serializes overrides sorted and nested", () => {
    const state = new OverlayState();
    state.setOverride("nodeB", "Knowledge", 5);
    state.setOverride("nodeA", "Resources", 2);
    state.setOverride("nodeA", "Knowledge", 3);
    expect(state.toDoc()).toEqual({
      disabled: [],
      rating_overrides: {
        nodeA: { Knowledge: 3, Resources: 2 },
        nodeB: { Knowledge: 5 },
      },
    });
  });

  it("clearing an override removes the entry", () => {
    const state = new OverlayState();
    state.setOverride("node", "Knowledge", 4);
    state.setOverride("node", "Knowledge", null);
    expect(state.toDoc().rating_overrides).toEqual({});
  });
});

describe("RequestQueue", () => {
  it("keeps a single request in flight and coalesces edits", async () => {
    const served: OverlayDoc[] = [];
    let release: (() => void) | null = null;
    const queue = new RequestQueue<OverlayDoc>(async (overlay) => {
      served.push(overlay);
      await new Promise<void>((resolve) => (release = resolve));
    });

    const first = queue.submit({ disabled: ["a"], rating_overrides: {} });
    // two edits while the first request is still running
    const second = queue.submit({ disabled: ["a", "b"], rating_overrides: {} });
    const third = queue.submit({ disabled: ["c"], rating_overrides: {} });

    expect(served).toHaveLength(1);
    release!();
    await Promise.resolve();
    await new Promise((r) => setTimeout(r, 0));
    expect(served).toHaveLength(2);
    expect(served[1].disabled).toEqual(["c"]); // newest overlay won
    release!();
    await Promise.all([first, second, third]);
    expect(served).toHaveLength(2);
  });

  it("idle resolves when nothing is queued", async () => {
    const queue = new RequestQueue<number>(async () => {});
    await queue.idle();
    await queue.submit(1);
    await queue.idle();
  });
});
