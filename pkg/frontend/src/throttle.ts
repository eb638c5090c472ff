// Rate limiter for the pointer stream: at most maxPerSecond sends, however
// fast the display samples the pointer.

export class RateLimiter {
  private minIntervalMs: number;
  private lastMs = -Infinity;

  constructor(maxPerSecond: number) {
    if (maxPerSecond <= 0) throw new Error("maxPerSecond must be positive");
    this.minIntervalMs = 1000 / maxPerSecond;
  }

  /** True when a send is allowed at `nowMs`; consumes the slot when so. */
  allow(nowMs: number): boolean {
    // epsilon absorbs float error when the display rate is an exact multiple
    if (nowMs - this.lastMs >= this.minIntervalMs - 1e-6) {
      this.lastMs = nowMs;
      return true;
    }
    return false;
  }
}
