// Canvas <-> dance-floor mapping. The floor is a square window centered on
// `center` (meters); x points right, y points up (canvas y is flipped).
// This is the mapping the service documents: pointer frames carry floor
// meters produced by floorFromCanvas.

export interface FloorView {
  widthPx: number;
  heightPx: number;
  /** floor meters visible across the smaller canvas dimension */
  spanM: number;
  center: { x: number; y: number };
}

export function defaultView(widthPx: number, heightPx: number): FloorView {
  return { widthPx, heightPx, spanM: 6, center: { x: 0, y: 0 } };
}

export function scalePxPerM(view: FloorView): number {
  return Math.min(view.widthPx, view.heightPx) / view.spanM;
}

export function canvasFromFloor(view: FloorView, fx: number, fy: number): { px: number; py: number } {
  const s = scalePxPerM(view);
  return {
    px: view.widthPx / 2 + (fx - view.center.x) * s,
    py: view.heightPx / 2 - (fy - view.center.y) * s,
  };
}

export function floorFromCanvas(view: FloorView, px: number, py: number): { x: number; y: number } {
  const s = scalePxPerM(view);
  return {
    x: view.center.x + (px - view.widthPx / 2) / s,
    y: view.center.y - (py - view.heightPx / 2) / s,
  };
}

export function inBounds(view: FloorView, px: number, py: number): boolean {
  return px >= 0 && px <= view.widthPx && py >= 0 && py <= view.heightPx;
}
