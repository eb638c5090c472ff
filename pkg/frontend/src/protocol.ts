// Wire schema shared with the training service: one JSON object per text
// frame, discriminated by "type". Pointer coordinates are floor meters.

export type ZoneColor = "blue" | "green" | "yellow" | "orange" | "grey";

export const ZONE_ORDER: ZoneColor[] = ["blue", "green", "yellow", "orange", "grey"];

export interface HelloMsg {
  type: "hello";
  name: string;
}

export interface StartMsg {
  type: "start";
  figure_kind: string;
}

export interface PointerMsg {
  type: "pointer";
  t_client: number;
  x: number;
  y: number;
}

export interface SetModeMsg {
  type: "set_mode";
  pt: boolean;
}

export interface StopMsg {
  type: "stop";
}

export type ClientMsg = HelloMsg | StartMsg | PointerMsg | SetModeMsg | StopMsg;

export interface ConfigMsg {
  type: "config";
  dt: number;
  tempo_bpm: number;
  figures: string[];
  mode: "pt" | "constant";
  tick_hz: number;
  beats: Record<string, number>;
}

export interface StateMsg {
  type: "state";
  t: number;
  guide: { x: number; y: number; phi: number };
  coupled: { x: number; y: number; phi: number; vx: number; vy: number; vphi: number };
  force: { x: number; y: number; phi: number };
  beat: number;
  figure_kind: string | null;
  practice_n: number;
}

export interface FigureResultMsg {
  type: "figure_result";
  figure_index: number;
  kind: string;
  practice_n: number;
  mean_e: number;
  bar_color: ZoneColor;
  cps: number;
  face_color: ZoneColor;
  kd: number[];
  kf: number[];
}

export interface SessionSummaryMsg {
  type: "session_summary";
  accuracy: number;
  final_cps: number;
  figures: Array<{
    figure_index: number;
    kind: string;
    practice_n: number;
    bar_color: ZoneColor;
    cps_after: number;
  }>;
}

export interface ErrorMsg {
  type: "error";
  text: string;
}

export type ServerMsg = ConfigMsg | StateMsg | FigureResultMsg | SessionSummaryMsg | ErrorMsg;

const isFiniteNumber = (v: unknown): v is number =>
  typeof v === "number" && Number.isFinite(v);

/** Validate an outbound frame against the client schema before sending. */
export function validateClientMsg(msg: unknown): msg is ClientMsg {
  if (typeof msg !== "object" || msg === null) return false;
  const m = msg as Record<string, unknown>;
  switch (m.type) {
    case "hello":
      return typeof m.name === "string" && m.name.length > 0;
    case "start":
      return typeof m.figure_kind === "string" && m.figure_kind.length > 0;
    case "pointer":
      return isFiniteNumber(m.t_client) && isFiniteNumber(m.x) && isFiniteNumber(m.y);
    case "set_mode":
      return typeof m.pt === "boolean";
    case "stop":
      return true;
    default:
      return false;
  }
}

const isZone = (v: unknown): v is ZoneColor =>
  typeof v === "string" && (ZONE_ORDER as string[]).includes(v);

/** Parse one inbound frame; returns null for anything malformed. */
export function parseServerMsg(raw: string): ServerMsg | null {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof data !== "object" || data === null) return null;
  const m = data as Record<string, any>;
  switch (m.type) {
    case "config":
      if (isFiniteNumber(m.dt) && isFiniteNumber(m.tempo_bpm) && Array.isArray(m.figures))
        return m as ConfigMsg;
      return null;
    case "state":
      if (
        isFiniteNumber(m.t) &&
        m.guide && isFiniteNumber(m.guide.x) && isFiniteNumber(m.guide.y) &&
        m.coupled && isFiniteNumber(m.coupled.x) && isFiniteNumber(m.coupled.y) &&
        m.force && isFiniteNumber(m.force.x)
      )
        return m as StateMsg;
      return null;
    case "figure_result":
      if (isZone(m.bar_color) && isZone(m.face_color) && isFiniteNumber(m.cps))
        return m as FigureResultMsg;
      return null;
    case "session_summary":
      if (isFiniteNumber(m.accuracy) && isFiniteNumber(m.final_cps) && Array.isArray(m.figures))
        return m as SessionSummaryMsg;
      return null;
    case "error":
      if (typeof m.text === "string") return m as ErrorMsg;
      return null;
    default:
      return null;
  }
}
