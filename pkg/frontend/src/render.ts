// Canvas renderer: floor plane, guide and coupled markers with trails, the
// 1-beat lookahead cue, force gauge, zone bar, face badge, and numeric
// readouts. Pure display: every value shown arrived in a server message.

import { canvasFromFloor, type FloorView } from "./mapping.js";
import { zoneFill, type PaletteName } from "./palette.js";
import { ZONE_ORDER, type ZoneColor } from "./protocol.js";
import type { TrailPoint, ViewState } from "./state.js";

export interface RenderOptions {
  palette: PaletteName;
}

function beatPeriodS(view: ViewState): number {
  const bpm = view.config?.tempo_bpm ?? 90;
  return 60 / bpm;
}

function drawTrail(ctx: CanvasRenderingContext2D, fv: FloorView,
                   trail: TrailPoint[], stroke: string): void {
  if (trail.length < 2) return;
  ctx.beginPath();
  trail.forEach((p, i) => {
    const { px, py } = canvasFromFloor(fv, p.x, p.y);
    if (i === 0) ctx.moveTo(px, py);
    else ctx.lineTo(px, py);
  });
  ctx.strokeStyle = stroke;
  ctx.lineWidth = 2;
  ctx.stroke();
}

function drawMarker(ctx: CanvasRenderingContext2D, fv: FloorView, x: number,
                    y: number, phi: number, fill: string, radiusPx: number): void {
  const { px, py } = canvasFromFloor(fv, x, y);
  ctx.beginPath();
  ctx.arc(px, py, radiusPx, 0, 2 * Math.PI);
  ctx.fillStyle = fill;
  ctx.fill();
  // heading tick
  ctx.beginPath();
  ctx.moveTo(px, py);
  ctx.lineTo(px + radiusPx * 1.6 * Math.cos(-phi), py + radiusPx * 1.6 * Math.sin(-phi));
  ctx.strokeStyle = fill;
  ctx.lineWidth = 2;
  ctx.stroke();
}

function drawFloor(ctx: CanvasRenderingContext2D, fv: FloorView): void {
  ctx.fillStyle = "#14161a";
  ctx.fillRect(0, 0, fv.widthPx, fv.heightPx);
  ctx.strokeStyle = "#272b33";
  ctx.lineWidth = 1;
  const half = fv.spanM / 2 + 2;
  for (let m = -Math.ceil(half); m <= Math.ceil(half); m++) {
    const v = canvasFromFloor(fv, m + fv.center.x, fv.center.y);
    ctx.beginPath();
    ctx.moveTo(v.px, 0);
    ctx.lineTo(v.px, fv.heightPx);
    ctx.stroke();
    const h = canvasFromFloor(fv, fv.center.x, m + fv.center.y);
    ctx.beginPath();
    ctx.moveTo(0, h.py);
    ctx.lineTo(fv.widthPx, h.py);
    ctx.stroke();
  }
}

/** Guide position one beat ahead, extrapolated from the recent trail. */
export function lookaheadPoint(view: ViewState): TrailPoint | null {
  const trail = view.guideTrail;
  const state = view.lastState;
  if (!state || trail.length < 2) return null;
  const a = trail[trail.length - 2];
  const b = trail[trail.length - 1];
  const cfg = view.config;
  const tickHz = cfg?.tick_hz ?? 30;
  const dtFrame = 1 / tickHz;
  const vx = (b.x - a.x) / dtFrame;
  const vy = (b.y - a.y) / dtFrame;
  const horizon = beatPeriodS(view);
  return { x: b.x + vx * horizon, y: b.y + vy * horizon };
}

function drawZoneBar(ctx: CanvasRenderingContext2D, view: ViewState,
                     options: RenderOptions, x0: number, y0: number): void {
  const cell = 34;
  ZONE_ORDER.forEach((zone, i) => {
    ctx.fillStyle = zoneFill(zone, options.palette);
    ctx.globalAlpha = view.currentBar === zone ? 1.0 : 0.28;
    ctx.fillRect(x0 + i * (cell + 4), y0, cell, 18);
    if (view.currentBar === zone) {
      ctx.globalAlpha = 1.0;
      ctx.strokeStyle = "#ffffff";
      ctx.lineWidth = 2;
      ctx.strokeRect(x0 + i * (cell + 4), y0, cell, 18);
    }
  });
  ctx.globalAlpha = 1.0;
}

function drawBarHistory(ctx: CanvasRenderingContext2D, history: ZoneColor[],
                        options: RenderOptions, x0: number, y0: number): void {
  const w = 10;
  const shown = history.slice(-24);
  shown.forEach((zone, i) => {
    ctx.fillStyle = zoneFill(zone, options.palette);
    ctx.fillRect(x0 + i * (w + 2), y0, w, 10);
  });
}

function drawFace(ctx: CanvasRenderingContext2D, view: ViewState,
                  options: RenderOptions, cx: number, cy: number): void {
  const color = view.faceColor ? zoneFill(view.faceColor, options.palette) : "#3c4048";
  ctx.beginPath();
  ctx.arc(cx, cy, 26, 0, 2 * Math.PI);
  ctx.fillStyle = color;
  ctx.fill();
  ctx.fillStyle = "#14161a";
  ctx.beginPath();
  ctx.arc(cx - 9, cy - 6, 3.4, 0, 2 * Math.PI);
  ctx.arc(cx + 9, cy - 6, 3.4, 0, 2 * Math.PI);
  ctx.fill();
  ctx.beginPath();
  ctx.arc(cx, cy + 5, 11, 0.15 * Math.PI, 0.85 * Math.PI);
  ctx.lineWidth = 2.6;
  ctx.strokeStyle = "#14161a";
  ctx.stroke();
}

function drawForceGauge(ctx: CanvasRenderingContext2D, view: ViewState,
                        fv: FloorView): void {
  const state = view.lastState;
  if (!state) return;
  const { px, py } = canvasFromFloor(fv, state.coupled.x, state.coupled.y);
  const scale = 0.8; // px per N
  ctx.beginPath();
  ctx.moveTo(px, py);
  ctx.lineTo(px + state.force.x * scale, py - state.force.y * scale);
  ctx.strokeStyle = "#e4533c";
  ctx.lineWidth = 3;
  ctx.stroke();
}

export function renderFrame(ctx: CanvasRenderingContext2D, fv: FloorView,
                            view: ViewState, options: RenderOptions): void {
  drawFloor(ctx, fv);
  drawTrail(ctx, fv, view.guideTrail, "#4d6aa833");
  drawTrail(ctx, fv, view.coupledTrail, "#d8ddebaa");
  const look = lookaheadPoint(view);
  if (look) {
    const { px, py } = canvasFromFloor(fv, look.x, look.y);
    ctx.beginPath();
    ctx.arc(px, py, 7, 0, 2 * Math.PI);
    ctx.setLineDash([3, 3]);
    ctx.strokeStyle = "#7ea0e0";
    ctx.lineWidth = 2;
    ctx.stroke();
    ctx.setLineDash([]);
  }
  const state = view.lastState;
  if (state) {
    drawMarker(ctx, fv, state.guide.x, state.guide.y, state.guide.phi, "#5c85e6", 9);
    drawMarker(ctx, fv, state.coupled.x, state.coupled.y, state.coupled.phi, "#f0f2f7", 11);
    drawForceGauge(ctx, view, fv);
  }
  drawZoneBar(ctx, view, options, 14, fv.heightPx - 34);
  drawBarHistory(ctx, view.barHistory, options, 14, fv.heightPx - 52);
  drawFace(ctx, view, options, fv.widthPx - 44, 44);

  ctx.fillStyle = "#c6ccda";
  ctx.font = "13px system-ui, sans-serif";
  const r = view.lastResult;
  const cps = r ? r.cps.toFixed(1) : "--";
  const kd = r ? r.kd.map((v) => v.toFixed(1)).join(" / ") : "--";
  const kf = r ? r.kf.map((v) => v.toFixed(3)).join(" / ") : "--";
  ctx.fillText(`CPS ${cps}`, 14, 22);
  ctx.fillText(`damping ${kd}`, 14, 40);
  ctx.fillText(`force gain ${kf}`, 14, 58);
  if (state) {
    ctx.fillText(`beat ${state.beat}  figure ${state.figure_kind ?? "-"}  practice ${state.practice_n}`, 14, 76);
  }
  if (view.status !== "connected") {
    ctx.fillStyle = "#000000aa";
    ctx.fillRect(0, 0, fv.widthPx, fv.heightPx);
    ctx.fillStyle = "#f0f2f7";
    ctx.font = "18px system-ui, sans-serif";
    ctx.fillText(
      view.status === "connecting" ? "connecting..." : "disconnected - reconnecting",
      fv.widthPx / 2 - 90, fv.heightPx / 2,
    );
  }
}
