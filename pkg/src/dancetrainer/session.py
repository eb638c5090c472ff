"""Training-session orchestration: figure sequencing, scoring at a fixed
rate, per-figure teaching ticks, and the persisted session record.

SessionEngine is shared by the offline runner and the live service so a
replayed input sequence reproduces a live session's score log byte for byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import SessionConfig, config_to_json
from .dynamics import CoupledSimulation
from .figures import desired_velocity_series, figure_by_kind, figure_duration
from .learner import CompliantIntent, LearnerIntent
from .scoring import CpsState, Zone, accuracy, classify, cps_update, face_color, figure_score, weighted_error
from .teaching import pt_tick, reset_for_student

SUMMARY_SCHEMA_VERSION = 1

SAMPLES_HEADER = "t,figure,kind,practice_n,E,zone,cps,face"
FIGURES_HEADER = "figure,kind,practice_n,mean_E,bar_zone,cps_after"
PT_TRACE_HEADER = (
    "figure_index,kind,practice_n,gamma_star,gamma,"
    "kd_x,kd_y,kd_phi,kf_x,kf_y,kf_phi,bar_color,face_color"
)


@dataclass(frozen=True)
class SampleRow:
    t: float
    figure_index: int
    kind: str
    practice_n: int
    error: float
    zone: Zone
    cps: float
    face: Zone

    def to_csv(self) -> str:
        return (
            f"{self.t!r},{self.figure_index},{self.kind},{self.practice_n},"
            f"{self.error!r},{self.zone.color},{self.cps!r},{self.face.color}"
        )


@dataclass(frozen=True)
class FigureRow:
    figure_index: int
    kind: str
    practice_n: int
    mean_error: float
    bar_zone: Zone
    cps_after: float

    def to_csv(self) -> str:
        return (
            f"{self.figure_index},{self.kind},{self.practice_n},"
            f"{self.mean_error!r},{self.bar_zone.color},{self.cps_after!r}"
        )


@dataclass(frozen=True)
class PtRow:
    figure_index: int
    kind: str
    practice_n: int
    gamma_star: float
    gamma: float
    kd: tuple
    kf: tuple
    bar_color: Zone
    face_color: Zone

    def to_csv(self) -> str:
        kd = ",".join(repr(float(v)) for v in self.kd)
        kf = ",".join(repr(float(v)) for v in self.kf)
        return (
            f"{self.figure_index},{self.kind},{self.practice_n},"
            f"{self.gamma_star!r},{self.gamma!r},{kd},{kf},"
            f"{self.bar_color.color},{self.face_color.color}"
        )


@dataclass
class SessionRecord:
    """Complete persisted history of one training session."""

    config: SessionConfig
    samples: list = field(default_factory=list)
    figures: list = field(default_factory=list)
    pt_trace: list = field(default_factory=list)
    final_cps: float = 0.0
    final_accuracy: float = 0.0

    def samples_csv(self) -> str:
        return "\n".join([SAMPLES_HEADER, *(r.to_csv() for r in self.samples)]) + "\n"

    def figures_csv(self) -> str:
        return "\n".join([FIGURES_HEADER, *(r.to_csv() for r in self.figures)]) + "\n"

    def pt_trace_csv(self) -> str:
        return "\n".join([PT_TRACE_HEADER, *(r.to_csv() for r in self.pt_trace)]) + "\n"

    def summary_dict(self) -> dict:
        return {
            "schema_version": SUMMARY_SCHEMA_VERSION,
            "mode": self.config.mode,
            "practices": len(self.figures),
            "total_samples": len(self.samples),
            "final_cps": self.final_cps,
            "final_accuracy": self.final_accuracy,
        }

    def write_dir(self, out_dir) -> Path:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "config.json").write_text(config_to_json(self.config), encoding="utf-8")
        (out / "samples.csv").write_text(self.samples_csv(), encoding="utf-8")
        (out / "figures.csv").write_text(self.figures_csv(), encoding="utf-8")
        (out / "pt_trace.csv").write_text(self.pt_trace_csv(), encoding="utf-8")
        (out / "summary.json").write_text(
            json.dumps(self.summary_dict(), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
        return out


class SessionEngine:
    """Step-level session state machine over the coupled simulation.

    Usage: begin_figure() once per figure, step_once() for every control
    step, end_figure() at the boundary. run_session() drives this offline;
    the live service drives it at wall-clock rate with pointer intent.
    """

    def __init__(self, cfg: SessionConfig, intent=None):
        self.cfg = cfg
        self.figures = {kind: figure_by_kind(kind) for kind in set(cfg.figure_sequence)}
        self.sim = CoupledSimulation(cfg.robot, cfg.human, cfg.dt, intent_velocity=None)
        self.cps_state = CpsState()
        self.pt_state = reset_for_student(cfg.pt, pt_mode=(cfg.mode == "pt"))
        self.record = SessionRecord(config=cfg)
        self.score_stride = max(1, int(round(1.0 / (cfg.scoring_hz * cfg.dt))))
        self.figure_index = -1

        if intent is not None:
            self.intent = intent
        elif cfg.intent == "compliant":
            self.intent = CompliantIntent(self._desired_now)
        else:
            self.intent = LearnerIntent(cfg.learner)

        self._fig = None
        self._fig_steps = 0
        self._step_in_fig = 0
        self._t_fig_start = 0.0
        self._vd_grid = None
        self._vddot_grid = None
        self._intent_grid = None
        self._pose_intent = False
        self._fig_errors = []
        self._exec_times = []
        self._exec_vels = []

    # -- figure lifecycle ---------------------------------------------------

    def kind_for(self, index: int) -> str:
        seq = self.cfg.figure_sequence
        return seq[index % len(seq)]

    def begin_figure(self, kind: str):
        cfg = self.cfg
        self.figure_index += 1
        fig = self.figures.get(kind) or figure_by_kind(kind)
        self.figures[kind] = fig
        duration = figure_duration(fig, cfg.tempo)
        n_steps = int(round(duration / cfg.dt))
        times = np.arange(n_steps + 1) * cfg.dt
        vd = desired_velocity_series(fig, times, cfg.tempo, cfg.scaling)
        self.sim.reanchor_intent()  # the couple regroups between figures
        self._fig = fig
        self._fig_steps = n_steps
        self._step_in_fig = 0
        self._t_fig_start = self.sim.t
        self._vd_grid = vd
        self._vddot_grid = np.gradient(vd, cfg.dt, axis=0)
        self._fig_errors = []
        self._exec_times = [0.0]
        self._exec_vels = [self.sim.coupled_velocity]

        if isinstance(self.intent, LearnerIntent):
            self.intent.retarget(fig, cfg.tempo, self._t_fig_start)
            noise = self.intent.params.noise_amp
            base = self.intent.model.profile_for(fig)
            ph = fig.phase_grid
            phases = times / duration
            grid = np.column_stack([
                np.interp(phases, ph, base[:, i]) for i in range(base.shape[1])
            ])
            if noise > 0.0:
                grid[:, :3] += self.intent.rng.uniform(-noise, noise, size=(len(times), 3))
            self._intent_grid = grid
        elif isinstance(self.intent, CompliantIntent):
            self._intent_grid = vd
        else:
            self._intent_grid = None  # live policies are queried per step
        self._pose_intent = self._intent_grid is None and hasattr(self.intent, "pose")

        if self.cfg.mode == "pt":
            self._apply_gains()

    def _apply_gains(self):
        kd = list(self.cfg.robot.k_d)
        kf = list(self.cfg.robot.k_f)
        kd[:3] = self.pt_state.kd_current
        kf[:3] = self.pt_state.kf_current
        self.sim.robot = self.sim.robot.with_gains(k_d=kd, k_f=kf)

    def _desired_now(self, t: float) -> np.ndarray:
        k = int(round((t - self._t_fig_start) / self.cfg.dt))
        k = min(max(k, 0), self._fig_steps)
        return self._vd_grid[k]

    @property
    def figure_done(self) -> bool:
        return self._step_in_fig >= self._fig_steps

    @property
    def current_figure_kind(self) -> str | None:
        return self._fig.kind if self._fig is not None else None

    @property
    def current_desired_velocity(self) -> np.ndarray:
        """Desired velocity for the upcoming step."""
        k = min(self._step_in_fig, self._fig_steps)
        return self._vd_grid[k]

    @property
    def time_in_figure(self) -> float:
        return self._step_in_fig * self.cfg.dt

    def step_once(self):
        """Advance one control step; score on the sampling grid.

        Returns the SampleRow when this step landed on a scoring sample,
        else None.
        """
        k = self._step_in_fig
        if k >= self._fig_steps:
            raise RuntimeError("figure already complete; call end_figure()")
        if self._intent_grid is not None:
            self.sim.step(self._vd_grid[k], self._vddot_grid[k],
                          xdot_h=self._intent_grid[k])
        elif self._pose_intent:
            self.sim.step(self._vd_grid[k], self._vddot_grid[k],
                          pose=self.intent.pose(self.sim.t))
        else:
            self.sim.step(self._vd_grid[k], self._vddot_grid[k],
                          xdot_h=self.intent(self.sim.t))
        self._step_in_fig = k + 1
        row = None
        if self._step_in_fig % self.score_stride == 0:
            row = self._score_sample()
        return row

    def _score_sample(self) -> SampleRow:
        cfg = self.cfg
        k = self._step_in_fig
        vd = self._vd_grid[k]
        vc = self.sim.coupled_velocity
        n = self.pt_state.practice_count(self._fig.kind)
        err = weighted_error(vd, vc, cfg.zones)
        zone = classify(err, n, cfg.zones)
        self.cps_state = cps_update(self.cps_state, zone, cfg.score)
        face = face_color(self.cps_state.cps, cfg.score)
        row = SampleRow(
            t=self.sim.t,
            figure_index=self.figure_index,
            kind=self._fig.kind,
            practice_n=n,
            error=err,
            zone=zone,
            cps=self.cps_state.cps,
            face=face,
        )
        self.record.samples.append(row)
        self._fig_errors.append(err)
        self._exec_times.append(self.sim.t - self._t_fig_start)
        self._exec_vels.append(vc)
        return row

    def end_figure(self):
        """Close the figure: bar score, teaching tick, learner update."""
        cfg = self.cfg
        fig = self._fig
        n = self.pt_state.practice_count(fig.kind)
        result = figure_score(self._fig_errors, n, cfg.zones)
        self.pt_state, events = pt_tick(
            self.pt_state, self.cps_state, fig.id, fig.kind, result,
            cfg.pt, cfg.score,
        )
        self.record.figures.append(FigureRow(
            figure_index=self.figure_index,
            kind=fig.kind,
            practice_n=n,
            mean_error=result[0],
            bar_zone=result[1],
            cps_after=self.cps_state.cps,
        ))
        bar = next(e for e in events if e.kind == "bar_color")
        face = next(e for e in events if e.kind == "face_color")
        self.record.pt_trace.append(PtRow(
            figure_index=self.figure_index,
            kind=fig.kind,
            practice_n=n,
            gamma_star=self.pt_state.gamma_star,
            gamma=self.pt_state.gamma,
            kd=self.pt_state.kd_current,
            kf=self.pt_state.kf_current,
            bar_color=bar.color,
            face_color=face.color,
        ))
        if isinstance(self.intent, LearnerIntent):
            self.intent.update(
                fig, cfg.tempo, cfg.scaling,
                np.asarray(self._exec_times), np.asarray(self._exec_vels),
            )
        return result, events

    def finalize(self) -> SessionRecord:
        self.record.final_cps = self.cps_state.cps
        if self.cps_state.n_total > 0:
            self.record.final_accuracy = accuracy(self.cps_state, self.cfg.score)
        return self.record


def run_session(cfg: SessionConfig, intent=None) -> SessionRecord:
    """Run a complete offline session; deterministic per config."""
    engine = SessionEngine(cfg, intent=intent)
    for i in range(cfg.practices):
        engine.begin_figure(engine.kind_for(i))
        while not engine.figure_done:
            engine.step_once()
        engine.end_figure()
    return engine.finalize()
