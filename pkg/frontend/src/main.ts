// Entry point: wires the socket, pointer capture, controls, and the render
// loop together on one event loop.

import { defaultView } from "./mapping.js";
import { PointerTracker } from "./pointer.js";
import type { PaletteName } from "./palette.js";
import { renderFrame } from "./render.js";
import { TrainerSocket } from "./socket.js";
import { applyServerMsg, initialViewState, setStatus, type ViewState } from "./state.js";

function wsUrl(): string {
  const loc = window.location;
  const scheme = loc.protocol === "https:" ? "wss" : "ws";
  return `${scheme}://${loc.host}/ws`;
}

function main(): void {
  const canvas = document.getElementById("floor") as HTMLCanvasElement;
  const ctx = canvas.getContext("2d")!;
  let fv = defaultView(canvas.width, canvas.height);
  const tracker = new PointerTracker(fv);

  let view: ViewState = initialViewState();
  let palette: PaletteName = "classic";

  const socket = new TrainerSocket(wsUrl(), {
    onMessage: (msg) => {
      view = applyServerMsg(view, msg);
      if (msg.type === "config") populateFigures(msg.figures);
      if (msg.type === "error") showStatusLine(`service: ${msg.text}`);
      if (msg.type === "session_summary") {
        showStatusLine(
          `session over: accuracy ${(msg.accuracy * 100).toFixed(1)}%, final CPS ${msg.final_cps.toFixed(1)}`,
        );
      }
    },
    onStatus: (connected) => {
      view = setStatus(view, connected ? "connected" : "disconnected");
      if (connected) socket.send({ type: "hello", name: "browser trainee" });
    },
  });
  socket.connect();

  const figureSelect = document.getElementById("figure") as HTMLSelectElement;
  const statusLine = document.getElementById("status") as HTMLElement;

  function populateFigures(kinds: string[]): void {
    figureSelect.innerHTML = "";
    for (const kind of kinds) {
      const opt = document.createElement("option");
      opt.value = kind;
      opt.textContent = kind;
      figureSelect.appendChild(opt);
    }
  }

  function showStatusLine(text: string): void {
    statusLine.textContent = text;
  }

  document.getElementById("start")!.addEventListener("click", () => {
    socket.send({ type: "start", figure_kind: figureSelect.value || "FWD" });
    showStatusLine(`practicing ${figureSelect.value || "FWD"}`);
  });
  document.getElementById("stop")!.addEventListener("click", () => {
    socket.send({ type: "stop" });
  });
  const ptToggle = document.getElementById("pt-mode") as HTMLInputElement;
  ptToggle.addEventListener("change", () => {
    socket.send({ type: "set_mode", pt: ptToggle.checked });
  });
  const paletteToggle = document.getElementById("palette") as HTMLInputElement;
  paletteToggle.addEventListener("change", () => {
    palette = paletteToggle.checked ? "colorblind" : "classic";
  });

  canvas.addEventListener("pointermove", (ev) => {
    const rect = canvas.getBoundingClientRect();
    const sample = tracker.sample(ev.clientX - rect.left, ev.clientY - rect.top,
                                  performance.now());
    if (sample) {
      socket.send({ type: "pointer", t_client: performance.now() / 1000,
                    x: sample.x, y: sample.y });
    }
  });

  function frame(): void {
    if (canvas.width !== fv.widthPx || canvas.height !== fv.heightPx) {
      fv = defaultView(canvas.width, canvas.height);
      tracker.setView(fv);
    }
    renderFrame(ctx, fv, view, { palette });
    requestAnimationFrame(frame);
  }
  requestAnimationFrame(frame);
}

main();
