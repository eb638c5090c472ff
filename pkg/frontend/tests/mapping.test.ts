import { describe, expect, it } from "vitest";

import { canvasFromFloor, defaultView, floorFromCanvas, inBounds, scalePxPerM } from "../src/mapping.js";

describe("floor mapping", () => {
  const view = defaultView(720, 560);

  it("centers the floor origin on the canvas", () => {
    const { px, py } = canvasFromFloor(view, 0, 0);
    expect(px).toBe(360);
    expect(py).toBe(280);
  });

  it("round-trips canvas coordinates within one pixel", () => {
    for (const [px, py] of [[0, 0], [719, 559], [123.4, 456.7], [360, 280]]) {
      const floor = floorFromCanvas(view, px, py);
      const back = canvasFromFloor(view, floor.x, floor.y);
      expect(Math.abs(back.px - px)).toBeLessThan(1);
      expect(Math.abs(back.py - py)).toBeLessThan(1);
    }
  });

  it("round-trips floor coordinates exactly enough for scoring", () => {
    for (const [fx, fy] of [[0, 0], [1.5, -2.0], [-2.9, 2.9]]) {
      const { px, py } = canvasFromFloor(view, fx, fy);
      const back = floorFromCanvas(view, px, py);
      expect(back.x).toBeCloseTo(fx, 9);
      expect(back.y).toBeCloseTo(fy, 9);
    }
  });

  it("flips the y axis (floor y up, canvas y down)", () => {
    const up = canvasFromFloor(view, 0, 1);
    const down = canvasFromFloor(view, 0, -1);
    expect(up.py).toBeLessThan(down.py);
  });

  it("scales by the smaller canvas dimension", () => {
    expect(scalePxPerM(view)).toBeCloseTo(560 / 6);
  });

  it("classifies bounds", () => {
    expect(inBounds(view, 10, 10)).toBe(true);
    expect(inBounds(view, -1, 10)).toBe(false);
    expect(inBounds(view, 10, 561)).toBe(false);
  });
});
