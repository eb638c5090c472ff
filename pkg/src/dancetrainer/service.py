"""Live training service: websocket bridge between the coupled simulation
and a browser trainee.

One trainee at a time. The trainee's pointer is an intent source, not a
position override: it drives the same spring-damper coupling as every other
intent policy, so force limits and guidance semantics are identical to the
offline simulator, and a recorded pointer log replays offline to the exact
same score log.

Wire protocol (text frames, one JSON object per frame, discriminated by
"type"; x/y are floor coordinates in meters — the client owns the
pixel-to-floor mapping and must use the scale it advertises):

  client -> server:
    {"type": "hello", "name": str}
    {"type": "start", "figure_kind": "FWD" | "BWD" | "CCLF" | ...}
    {"type": "pointer", "t_client": float, "x": float, "y": float}
    {"type": "set_mode", "pt": bool}
    {"type": "stop"}

  server -> client:
    {"type": "config", "dt", "tempo_bpm", "figures", "mode", "tick_hz",
     "beats": {...}}
    {"type": "state", "t", "guide": {x, y, phi}, "coupled": {x, y, phi,
     vx, vy, vphi}, "force": {x, y, phi}, "beat", "figure_kind",
     "practice_n"}
    {"type": "figure_result", "figure_index", "kind", "practice_n",
     "mean_e", "bar_color", "cps", "face_color", "kd", "kf"}
    {"type": "session_summary", "accuracy", "final_cps", "figures"}
    {"type": "error", "text"}

State frames may be dropped for slow clients; figure_result and
session_summary are never dropped.
"""

from __future__ import annotations

import asyncio
import json
import math
from collections import deque
from dataclasses import replace
from pathlib import Path

import numpy as np
from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .config import SessionConfig
from .dynamics import HumanParams
from .figures import FIGURE_KINDS, N_AXES, figure_by_kind
from .session import SessionEngine, SessionRecord

POINTER_CUTOFF_HZ = 5.0
POINTER_STALE_AFTER = 0.2  # seconds of silence before the intent freezes
MAX_TICK_HZ = 60.0

# soft-hand coupling for a live trainee (the simulated-session default is firmer)
INTERACTIVE_HUMAN = HumanParams(m_h=70.0, k_h=300.0, d_h=60.0)


class PointerIntent:
    """Maps a pointer sample stream to a human intent pose.

    Position: the latest pointer sample. Velocity: finite difference over
    the last two applied samples, low-pass filtered (first order, 5 Hz
    cutoff); after 200 ms without input the target velocity is zero (frozen
    semantics). Rotation and upper-body axes follow the guide. Sample
    application times are simulation times, so a recorded log replays
    deterministically.
    """

    def __init__(self, dt: float, cutoff_hz: float = POINTER_CUTOFF_HZ,
                 stale_after: float = POINTER_STALE_AFTER):
        self.dt = dt
        self.tau = 1.0 / (2.0 * math.pi * cutoff_hz)
        self.stale_after = stale_after
        self.position = np.zeros(2)
        self.v_raw = np.zeros(2)
        self.v_filt = np.zeros(2)
        self.last_applied_t = None
        self.guide_phi_pos = 0.0
        self.guide_phi_vel = 0.0
        self.log = []  # (global_step, x, y) as applied

    def apply(self, global_step: int, sim_t: float, x: float, y: float):
        """Apply one pointer sample at a step boundary."""
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ValueError("pointer coordinates must be finite")
        new = np.array([x, y])
        if self.last_applied_t is not None and sim_t > self.last_applied_t:
            self.v_raw = (new - self.position) / (sim_t - self.last_applied_t)
        self.position = new
        self.last_applied_t = sim_t
        self.log.append((global_step, x, y))

    def pose(self, t: float):
        """Intent pose (position, velocity) for the simulation step at time t."""
        target = self.v_raw
        if self.last_applied_t is None or t - self.last_applied_t > self.stale_after:
            target = np.zeros(2)
        self.v_filt = self.v_filt + (self.dt / self.tau) * (target - self.v_filt)
        x_h = np.zeros(N_AXES)
        xdot_h = np.zeros(N_AXES)
        x_h[:2] = self.position
        xdot_h[:2] = self.v_filt
        x_h[2] = self.guide_phi_pos
        xdot_h[2] = self.guide_phi_vel
        return x_h, xdot_h


class LiveSession:
    """Owns one trainee's engine, pointer intent, and message log.

    The websocket handler feeds pointer/control messages in; the tick loop
    advances the simulation in fixed steps and pulls outbound events.
    """

    def __init__(self, cfg: SessionConfig):
        self.cfg = cfg
        self.intent = PointerIntent(cfg.dt)
        self.engine = SessionEngine(cfg, intent=self.intent)
        self.pointer_queue = deque()
        self.guide_pos = np.zeros(N_AXES)
        self.global_step = 0
        self.running = False
        self.next_kind = None
        self.figure_kinds_played = []
        self.outbound_events = []
        self._figure_open = False

    def start_figure(self, kind: str):
        kind = kind.upper()
        if kind not in FIGURE_KINDS:
            raise ValueError(f"unknown figure kind {kind!r}")
        self.running = True
        self.next_kind = kind
        if not self._figure_open:
            self._begin(kind)

    def _begin(self, kind: str):
        self.engine.begin_figure(kind)
        self.figure_kinds_played.append(kind)
        self._figure_open = True

    def set_mode(self, pt: bool):
        self.engine.pt_state = replace(self.engine.pt_state, pt_mode=bool(pt))

    def push_pointer(self, x: float, y: float):
        self.pointer_queue.append((float(x), float(y)))

    def advance(self, n_steps: int):
        """Advance the simulation by n fixed steps, applying queued pointer
        samples one per step; emits figure_result events at boundaries."""
        for _ in range(n_steps):
            if not self.running:
                return
            if not self._figure_open:
                self._begin(self.next_kind)
            if self.pointer_queue:
                x, y = self.pointer_queue.popleft()
                self.intent.apply(self.global_step, self.engine.sim.t, x, y)
            vd = self.engine.current_desired_velocity
            self.intent.guide_phi_vel = float(vd[2])
            self.intent.guide_phi_pos = float(self.guide_pos[2])
            self.engine.step_once()
            self.guide_pos = self.guide_pos + vd * self.cfg.dt
            self.global_step += 1
            if self.engine.figure_done:
                self._finish_figure()

    def _finish_figure(self):
        if not self._figure_open:
            return
        self._figure_open = False
        result, events = self.engine.end_figure()
        row = self.engine.record.pt_trace[-1]
        self.outbound_events.append({
            "type": "figure_result",
            "figure_index": row.figure_index,
            "kind": row.kind,
            "practice_n": row.practice_n,
            "mean_e": result[0],
            "bar_color": row.bar_color.color,
            "cps": self.engine.cps_state.cps,
            "face_color": row.face_color.color,
            "kd": list(self.engine.pt_state.kd_current),
            "kf": list(self.engine.pt_state.kf_current),
        })

    def state_message(self) -> dict:
        s = self.engine.sim.state
        beat_period = 60.0 / self.cfg.tempo.bpm
        beat = int(self.engine.time_in_figure / beat_period) + 1 if self.running else 0
        kind = self.engine.current_figure_kind
        return {
            "type": "state",
            "t": s.t,
            "guide": {"x": self.guide_pos[0], "y": self.guide_pos[1],
                      "phi": self.guide_pos[2]},
            "coupled": {"x": s.x_c[0], "y": s.x_c[1], "phi": s.x_c[2],
                        "vx": s.xdot_c[0], "vy": s.xdot_c[1], "vphi": s.xdot_c[2]},
            "force": {"x": s.f_i[0], "y": s.f_i[1], "phi": s.f_i[2]},
            "beat": beat,
            "figure_kind": kind,
            "practice_n": self.engine.pt_state.practice_count(kind) if kind else 0,
        }

    def summary_message(self) -> dict:
        record = self.finalize()
        return {
            "type": "session_summary",
            "accuracy": record.final_accuracy,
            "final_cps": record.final_cps,
            "figures": [
                {"figure_index": r.figure_index, "kind": r.kind,
                 "practice_n": r.practice_n, "bar_color": r.bar_zone.color,
                 "cps_after": r.cps_after}
                for r in record.figures
            ],
        }

    def finalize(self) -> SessionRecord:
        self.running = False
        return self.engine.finalize()

    def write_archive(self, out_dir):
        out = self.finalize().write_dir(out_dir)
        lines = ["step,x,y"]
        lines += [f"{s},{x!r},{y!r}" for s, x, y in self.intent.log]
        (out / "pointer_log.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
        (out / "figure_kinds.txt").write_text(
            "\n".join(self.figure_kinds_played) + "\n", encoding="utf-8")
        return out


def replay_pointer_session(cfg: SessionConfig, figure_kinds,
                           pointer_events) -> SessionRecord:
    """Offline replay of a live session from its pointer log.

    figure_kinds is the ordered list of completed figures; pointer_events
    are (global_step, x, y) rows. Produces the identical score log the live
    session recorded.
    """
    intent = PointerIntent(cfg.dt)
    engine = SessionEngine(cfg, intent=intent)
    events = deque(pointer_events)
    guide_pos = np.zeros(N_AXES)
    gstep = 0
    for kind in figure_kinds:
        engine.begin_figure(kind)
        while not engine.figure_done:
            if events and events[0][0] == gstep:
                _, x, y = events.popleft()
                intent.apply(gstep, engine.sim.t, x, y)
            vd = engine.current_desired_velocity
            intent.guide_phi_vel = float(vd[2])
            intent.guide_phi_pos = float(guide_pos[2])
            engine.step_once()
            guide_pos = guide_pos + vd * cfg.dt
            gstep += 1
        engine.end_figure()
    return engine.finalize()


def interactive_config(cfg: SessionConfig | None = None) -> SessionConfig:
    """Session config adjusted for a live trainee (soft-hand coupling)."""
    base = cfg or SessionConfig()
    return replace(base, human=INTERACTIVE_HUMAN, intent="compliant")


def create_app(cfg: SessionConfig | None = None, tick_hz: float = 30.0,
               out_root=None, static_dir=None) -> FastAPI:
    """FastAPI app exposing the websocket endpoint and the UI bundle."""
    tick_hz = min(max(tick_hz, 1.0), MAX_TICK_HZ)
    base_cfg = interactive_config(cfg)
    app = FastAPI(title="dancetrainer live service")
    busy = {"active": False}
    session_counter = {"n": 0}

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "busy": busy["active"]}

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await ws.accept()
        if busy["active"]:
            await ws.send_text(json.dumps(
                {"type": "error", "text": "another trainee is connected"}))
            await ws.close()
            return
        busy["active"] = True
        session = LiveSession(base_cfg)
        outbox: asyncio.Queue = asyncio.Queue()
        stop_event = asyncio.Event()

        async def sender():
            while True:
                msg = await outbox.get()
                if msg is None:
                    return
                await ws.send_text(json.dumps(msg))

        async def tick_loop():
            period = 1.0 / tick_hz
            steps_per_tick = max(1, int(round(period / base_cfg.dt)))
            loop = asyncio.get_running_loop()
            deadline = loop.time() + period
            try:
                while not stop_event.is_set():
                    # absolute scheduling: tick drift does not accumulate
                    await asyncio.sleep(max(0.0, deadline - loop.time()))
                    deadline += period
                    if session.running:
                        session.advance(steps_per_tick)
                    for event in session.outbound_events:
                        outbox.put_nowait(event)  # reliable: never dropped
                    session.outbound_events.clear()
                    if session.running and outbox.qsize() < 8:
                        # back-pressure: stale state frames are simply dropped
                        outbox.put_nowait(session.state_message())
            except Exception as exc:  # surfaces sim faults to the client
                outbox.put_nowait({"type": "error", "text": str(exc)})

        sender_task = asyncio.create_task(sender())
        ticker_task = asyncio.create_task(tick_loop())
        try:
            while True:
                raw = await ws.receive_text()
                try:
                    msg = json.loads(raw)
                    kind = msg.get("type")
                    if kind == "hello":
                        outbox.put_nowait({
                            "type": "config",
                            "dt": base_cfg.dt,
                            "tempo_bpm": base_cfg.tempo.bpm,
                            "figures": list(FIGURE_KINDS),
                            "mode": "pt" if session.engine.pt_state.pt_mode else "constant",
                            "tick_hz": tick_hz,
                            "beats": {k: figure_by_kind(k).beats for k in FIGURE_KINDS},
                        })
                    elif kind == "start":
                        session.start_figure(msg["figure_kind"])
                    elif kind == "pointer":
                        session.push_pointer(msg["x"], msg["y"])
                    elif kind == "set_mode":
                        session.set_mode(msg["pt"])
                    elif kind == "stop":
                        outbox.put_nowait(session.summary_message())
                    else:
                        raise ValueError(f"unknown message type {kind!r}")
                except (KeyError, ValueError, TypeError) as exc:
                    outbox.put_nowait({"type": "error", "text": str(exc)})
        except WebSocketDisconnect:
            pass
        finally:
            # synchronous teardown first: cancellation of this coroutine must
            # not be able to skip the archive write
            stop_event.set()
            ticker_task.cancel()
            busy["active"] = False
            if session.engine.record.samples and out_root is not None:
                session_counter["n"] += 1
                session.write_archive(
                    Path(out_root) / f"session-{session_counter['n']:03d}")
            outbox.put_nowait(None)
            await asyncio.gather(sender_task, return_exceptions=True)

    if static_dir is not None and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    return app


def serve_forever(cfg: SessionConfig | None = None, port: int = 8752,
                  tick_hz: float = 30.0, out_root="sessions"):
    """Blocking entry point used by the CLI `serve` subcommand."""
    import uvicorn

    static = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    app = create_app(cfg, tick_hz=tick_hz, out_root=out_root,
                     static_dir=static if static.is_dir() else None)
    uvicorn.run(app, host="127.0.0.1", port=port, log_level="warning")
