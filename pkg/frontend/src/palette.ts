// Zone color scales: the default 5-step scale plus a color-blind-safe
// alternate (Okabe-Ito derived) toggled at runtime.

import type { ZoneColor } from "./protocol.js";

export type PaletteName = "classic" | "colorblind";

const CLASSIC: Record<ZoneColor, string> = {
  blue: "#2f6fd6",
  green: "#3fa34d",
  yellow: "#e8c231",
  orange: "#e87f2f",
  grey: "#8a8a8a",
};

const COLORBLIND: Record<ZoneColor, string> = {
  blue: "#0072b2",
  green: "#009e73",
  yellow: "#f0e442",
  orange: "#d55e00",
  grey: "#999999",
};

export function zoneFill(zone: ZoneColor, palette: PaletteName): string {
  return palette === "colorblind" ? COLORBLIND[zone] : CLASSIC[zone];
}
