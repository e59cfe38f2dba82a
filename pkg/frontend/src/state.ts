/** Overlay editing and the single-in-flight request queue.
 *
 * The UI never computes risk or feasibility; it only edits the overlay
 * (disabled countermeasures, rating and impact overrides) and re-submits.
 * While one evaluation request is in flight further edits coalesce: the
 * newest overlay wins and is sent once the current response has landed.
 */

import type { OverlayDoc } from "./types.js";

export class OverlayState {
  private disabled = new Set<string>();
  private overrides = new Map<string, Map<string, number>>();

  toggle(countermeasureId: string): void {
    if (this.disabled.has(countermeasureId)) {
      this.disabled.delete(countermeasureId);
    } else {
      this.disabled.add(countermeasureId);
    }
  }

  isDisabled(countermeasureId: string): boolean {
    return this.disabled.has(countermeasureId);
  }

  setOverride(target: string, attribute: string, rank: number | null): void {
    const entry = this.overrides.get(target) ?? new Map<string, number>();
    if (rank === null) {
      entry.delete(attribute);
    } else {
      entry.set(attribute, rank);
    }
    if (entry.size === 0) {
      this.overrides.delete(target);
    } else {
      this.overrides.set(target, entry);
    }
  }

  reset(): void {
    this.disabled.clear();
    this.overrides.clear();
  }

  toDoc(): OverlayDoc {
    const rating_overrides: Record<string, Record<string, number>> = {};
    for (const target of Array.from(this.overrides.keys()).sort()) {
      const attrs = this.overrides.get(target)!;
      rating_overrides[target] = {};
      for (const attribute of Array.from(attrs.keys()).sort()) {
        rating_overrides[target][attribute] = attrs.get(attribute)!;
      }
    }
    return { disabled: Array.from(this.disabled).sort(), rating_overrides };
  }
}

/** Serializes submissions: at most one runner active, newest payload wins. */
export class RequestQueue<T> {
  private inflight: Promise<void> | null = null;
  private pending: T | null = null;
  private waiters: Array<() => void> = [];

  constructor(private readonly run: (payload: T) => Promise<void>) {}

  submit(payload: T): Promise<void> {
    this.pending = payload;
    if (!this.inflight) {
      this.inflight = this.drain();
    }
    return new Promise((resolve) => this.waiters.push(resolve));
  }

  /** Resolves once nothing is in flight and nothing is queued. */
  idle(): Promise<void> {
    return this.inflight ?? Promise.resolve();
  }

  private async drain(): Promise<void> {
    try {
      while (this.pending !== null) {
        const payload = this.pending;
        this.pending = null;
        await this.run(payload);
        if (this.pending === null) {
          const waiters = this.waiters;
          this.waiters = [];
          for (const resolve of waiters) {
            resolve();
          }
        }
      }
    } finally {
      this.inflight = null;
      const waiters = this.waiters;
      this.waiters = [];
      for (const resolve of waiters) {
        resolve();
      }
    }
  }
}
