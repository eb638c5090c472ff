// View state: a mirror of what the service said, nothing more. No scoring,
// zone, CPS, or gain computation happens here; the face color is always the
// last face_color the service sent.

import type {
  ConfigMsg,
  FigureResultMsg,
  ServerMsg,
  SessionSummaryMsg,
  StateMsg,
  ZoneColor,
} from "./protocol.js";

export type ConnectionStatus = "connecting" | "connected" | "disconnected";

export interface TrailPoint {
  x: number;
  y: number;
}

export interface ViewState {
  status: ConnectionStatus;
  config: ConfigMsg | null;
  lastState: StateMsg | null;
  faceColor: ZoneColor | null;
  currentBar: ZoneColor | null;
  barHistory: ZoneColor[];
  lastResult: FigureResultMsg | null;
  summary: SessionSummaryMsg | null;
  lastError: string | null;
  guideTrail: TrailPoint[];
  coupledTrail: TrailPoint[];
}

export const TRAIL_LIMIT = 600;

export function initialViewState(): ViewState {
  return {
    status: "connecting",
    config: null,
    lastState: null,
    faceColor: null,
    currentBar: null,
    barHistory: [],
    lastResult: null,
    summary: null,
    lastError: null,
    guideTrail: [],
    coupledTrail: [],
  };
}

function pushTrail(trail: TrailPoint[], p: TrailPoint): TrailPoint[] {
  const next = trail.length >= TRAIL_LIMIT ? trail.slice(1) : trail.slice();
  next.push(p);
  return next;
}

export function applyServerMsg(view: ViewState, msg: ServerMsg): ViewState {
  switch (msg.type) {
    case "config":
      return { ...view, config: msg };
    case "state":
      return {
        ...view,
        lastState: msg,
        guideTrail: pushTrail(view.guideTrail, { x: msg.guide.x, y: msg.guide.y }),
        coupledTrail: pushTrail(view.coupledTrail, { x: msg.coupled.x, y: msg.coupled.y }),
      };
    case "figure_result":
      return {
        ...view,
        lastResult: msg,
        faceColor: msg.face_color,
        currentBar: msg.bar_color,
        barHistory: [...view.barHistory, msg.bar_color],
      };
    case "session_summary":
      return { ...view, summary: msg };
    case "error":
      return { ...view, lastError: msg.text };
  }
}

export function setStatus(view: ViewState, status: ConnectionStatus): ViewState {
  return { ...view, status };
}
