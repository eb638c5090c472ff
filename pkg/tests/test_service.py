import json
import time
from pathlib import Path

import numpy as np
import pytest
from starlette.testclient import TestClient

from dancetrainer.config import SessionConfig, load_config
from dancetrainer.service import (
    LiveSession,
    PointerIntent,
    create_app,
    interactive_config,
    replay_pointer_session,
)

FAST_CFG = SessionConfig(figure_sequence=("FWD",), practices=2, dt=0.005,
                         scoring_hz=50.0)


# -- pointer intent ------------------------------------------------------------

def test_no_input_behaves_as_frozen_intent():
    intent = PointerIntent(dt=0.005)
    for k in range(100):
        x_h, xdot_h = intent.pose(k * 0.005)
        np.testing.assert_array_equal(x_h[:2], np.zeros(2))
        np.testing.assert_array_equal(xdot_h[:2], np.zeros(2))


def test_stationary_pointer_velocity_decays_within_three_time_constants():
    dt = 0.005
    intent = PointerIntent(dt=dt)
    # move steadily to build up a filtered velocity estimate
    v = np.zeros(7)
    for k in range(60):
        t = k * dt
        if k % 4 == 0:
            intent.apply(k, t, 0.5 * t, 0.0)
        _, v = intent.pose(t)
    v_moving = abs(v[0])
    assert v_moving > 0.3
    # the pointer stops but keeps streaming the same position
    hold_x = float(intent.position[0])
    t_hold = 60 * dt
    t = t_hold
    while t - t_hold < 3 * intent.tau:
        k = int(round(t / dt))
        if k % 4 == 0:
            intent.apply(k, t, hold_x, 0.0)
        _, v = intent.pose(t)
        t += dt
    assert abs(v[0]) < 0.06 * v_moving  # ~exp(-3) of the moving estimate


def test_constant_velocity_pointer_converges_to_mapped_velocity():
    dt = 0.002
    intent = PointerIntent(dt=dt)
    speed = 0.25  # m/s along x
    t = 0.0
    for k in range(400):
        t = k * dt
        if k % 8 == 0:  # ~60 Hz pointer stream
            intent.apply(k, t, speed * t, 0.0)
        _, xdot_h = intent.pose(t)
    assert xdot_h[0] == pytest.approx(speed, rel=0.05)


def test_pointer_rejects_non_finite_coordinates():
    intent = PointerIntent(dt=0.005)
    with pytest.raises(ValueError):
        intent.apply(0, 0.0, float("nan"), 0.0)


# -- live session mechanics ------------------------------------------------------

def test_live_session_completes_figures_and_emits_results():
    session = LiveSession(interactive_config(FAST_CFG))
    session.start_figure("FWD")
    steps_per_figure = int(round(2.0 / FAST_CFG.dt))
    session.advance(steps_per_figure + 5)
    assert len(session.outbound_events) >= 1
    event = session.outbound_events[0]
    assert event["type"] == "figure_result"
    assert event["kind"] == "FWD"
    assert event["practice_n"] == 0
    assert isinstance(event["bar_color"], str)


def test_live_session_rejects_unknown_figure():
    session = LiveSession(interactive_config(FAST_CFG))
    with pytest.raises(ValueError):
        session.start_figure("TANGO")


def test_no_pointer_input_stalls_at_the_force_limit():
    # with the intent frozen at the origin, guidance pushes to its bound and
    # the coupled motion falls far below the desired velocity
    session = LiveSession(interactive_config(FAST_CFG))
    session.start_figure("FWD")
    forces, vels = [], []
    for _ in range(300):
        session.advance(1)
        s = session.engine.sim.state
        forces.append(s.f_i[0])
        vels.append(s.xdot_c[0])
    cap = 1.0 * 32.0 + 130.0 * 0.3  # K_f F_d + K_d * cruise
    assert max(forces) > 0.8 * cap
    assert abs(vels[-1]) < 0.5 * 0.3


def test_figure_result_emitted_exactly_once_per_figure():
    session = LiveSession(interactive_config(FAST_CFG))
    session.start_figure("FWD")
    steps_per_figure = int(round(2.0 / FAST_CFG.dt))
    session.advance(2 * steps_per_figure + 7)
    assert len(session.outbound_events) == 2
    assert [e["figure_index"] for e in session.outbound_events] == [0, 1]


def test_set_mode_freezes_gains():
    session = LiveSession(interactive_config(FAST_CFG))
    session.set_mode(False)
    session.start_figure("FWD")
    session.advance(int(round(2.0 / FAST_CFG.dt)) * 2 + 10)
    kds = {tuple(e["kd"]) for e in session.outbound_events}
    assert len(kds) == 1


# -- websocket endpoint -----------------------------------------------------------

def drain_until(ws, wanted_type, limit=500):
    frames = []
    for _ in range(limit):
        msg = json.loads(ws.receive_text())
        frames.append(msg)
        if msg["type"] == wanted_type:
            return msg, frames
        if msg["type"] == "error":
            raise AssertionError(f"unexpected error frame: {msg}")
    raise AssertionError(f"no {wanted_type!r} frame within {limit} messages")


@pytest.fixture()
def app_env(tmp_path):
    app = create_app(FAST_CFG, tick_hz=30.0, out_root=tmp_path)
    return app, tmp_path


def test_live_session_replays_byte_identically(app_env):
    app, out_root = app_env
    client = TestClient(app)
    with client.websocket_connect("/ws") as ws:
        ws.send_text(json.dumps({"type": "hello", "name": "tester"}))
        config_msg, _ = drain_until(ws, "config")
        assert config_msg["dt"] == FAST_CFG.dt
        assert config_msg["tick_hz"] == 30.0
        ws.send_text(json.dumps({"type": "start", "figure_kind": "FWD"}))
        # faithful trainee: echo the guide position back as pointer input
        state_count = 0
        while True:
            msg = json.loads(ws.receive_text())
            if msg["type"] == "state":
                state_count += 1
                ws.send_text(json.dumps({
                    "type": "pointer", "t_client": time.time(),
                    "x": msg["guide"]["x"], "y": msg["guide"]["y"],
                }))
            elif msg["type"] == "figure_result":
                first_result = msg
                break
        ws.send_text(json.dumps({"type": "stop"}))
        summary, _ = drain_until(ws, "session_summary")
    assert state_count > 10
    assert summary["figures"][0]["bar_color"] == first_result["bar_color"]

    # the archive appears once the endpoint finishes tearing down
    deadline = time.time() + 5.0
    session_dir = None
    while time.time() < deadline:
        dirs = list(Path(out_root).glob("session-*"))
        if dirs and (dirs[0] / "pointer_log.csv").exists():
            session_dir = dirs[0]
            break
        time.sleep(0.05)
    assert session_dir is not None, "session archive was not written"

    cfg = load_config(session_dir / "config.json")
    kinds = (session_dir / "figure_kinds.txt").read_text().split()
    log_rows = (session_dir / "pointer_log.csv").read_text().strip().splitlines()[1:]
    events = [(int(r.split(",")[0]), float(r.split(",")[1]), float(r.split(",")[2]))
              for r in log_rows]
    assert events, "live session recorded no pointer samples"

    replayed = replay_pointer_session(cfg, kinds[:1], events)
    live_samples = (session_dir / "samples.csv").read_text()
    # live session may contain extra partial-figure samples after the first
    # figure; compare the first figure's complete block byte for byte
    replay_lines = replayed.samples_csv().splitlines()
    live_lines = live_samples.splitlines()
    assert live_lines[: len(replay_lines)] == replay_lines


def test_second_trainee_is_rejected(app_env):
    app, _ = app_env
    client = TestClient(app)
    with client.websocket_connect("/ws") as ws1:
        ws1.send_text(json.dumps({"type": "hello", "name": "one"}))
        drain_until(ws1, "config")
        with client.websocket_connect("/ws") as ws2:
            msg = json.loads(ws2.receive_text())
            assert msg["type"] == "error"
            assert "another" in msg["text"]


def test_malformed_message_keeps_connection(app_env):
    app, _ = app_env
    client = TestClient(app)
    with client.websocket_connect("/ws") as ws:
        ws.send_text(json.dumps({"type": "moonwalk"}))
        msg = json.loads(ws.receive_text())
        assert msg["type"] == "error"
        ws.send_text(json.dumps({"type": "hello", "name": "still here"}))
        msg, _ = drain_until(ws, "config")
        assert msg["type"] == "config"


def test_healthz_reports_idle(app_env):
    app, _ = app_env
    client = TestClient(app)
    assert client.get("/healthz").json() == {"status": "ok", "busy": False}
