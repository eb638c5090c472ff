// Pointer capture: sample at display rate, throttle to the wire budget, map
// to floor coordinates. When the pointer leaves the canvas the last
// in-bounds sample is repeated once; the service's staleness rule then
// freezes the intent.

import { floorFromCanvas, inBounds, type FloorView } from "./mapping.js";
import { RateLimiter } from "./throttle.js";

export const MAX_POINTER_MSGS_PER_S = 60;

export interface PointerSample {
  x: number;
  y: number;
}

export class PointerTracker {
  private limiter = new RateLimiter(MAX_POINTER_MSGS_PER_S);
  private lastInBounds: PointerSample | null = null;
  private exitRepeated = false;

  constructor(private view: FloorView) {}

  setView(view: FloorView): void {
    this.view = view;
  }

  /** Map a canvas-pixel sample; returns the floor sample to send, or null. */
  sample(px: number, py: number, nowMs: number): PointerSample | null {
    if (inBounds(this.view, px, py)) {
      if (!this.limiter.allow(nowMs)) return null;
      const p = floorFromCanvas(this.view, px, py);
      this.lastInBounds = p;
      this.exitRepeated = false;
      return p;
    }
    if (this.lastInBounds && !this.exitRepeated) {
      if (!this.limiter.allow(nowMs)) return null;
      this.exitRepeated = true;
      return this.lastInBounds;
    }
    return null;
  }
}
