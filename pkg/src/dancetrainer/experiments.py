"""Preset experiments: CPS-under-learning curves, the force-limit stop test,
stability-region sweeps, paired adaptive-vs-constant cohorts, and offline
scoring of recorded trajectories.

Every runner writes plain comma-separated tables plus a JSON manifest of the
parameters that produced them; reruns are byte-identical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .config import SESSION_ERROR_SCALE, SessionConfig, config_to_dict
from .dynamics import HumanParams, RobotParams, StabilityGrid, stability_map, stop_test
from .figures import Tempo, figure_by_kind, figure_duration, desired_velocity_series
from .learner import LearnerParams, simulate_error_sequence
from .scoring import (
    CpsState,
    ScoreParams,
    ZoneConfig,
    accuracy,
    classify,
    cps_update,
    figure_score,
    weighted_error,
    zone_boundaries,
    zone_width,
)
from .session import SessionRecord, run_session

# the partner who plants their feet for the force-limit test
STOP_TEST_HUMAN = HumanParams(m_h=70.0, k_h=80_000.0, d_h=4400.0)
STOP_TEST_WINDOW = (2.0, 6.0)

FIG5_PRACTICES = 200
FIG5_SAMPLES_PER_PRACTICE = 10
FIG5_NOISE_FRACTION = 0.15
FIG5_LEARNER_GAINS = (0.01, 0.02)

COHORT_GAINS = (0.04, 0.06, 0.08, 0.10, 0.12, 0.14)
COHORT_SKILL_LEVELS = (0.0, 0.25, 0.5)


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _manifest(path: Path, params: dict):
    _write(path, json.dumps(params, indent=2, sort_keys=True) + "\n")


# -- CPS-vs-practice curves under the simple learning law ------------------------

def fig5_baseline_levels(cfg: ZoneConfig | None = None) -> list[float]:
    """Six error levels spanning the zone ladder at practice count 0.

    Level 1 sits past the Orange limit (Grey), levels 2..4 at the Orange,
    Yellow, and Green midpoints, levels 5..6 inside Blue.
    """
    cfg = cfg or ZoneConfig()
    b = zone_boundaries(0, cfg)
    return [
        b[3] + zone_width(4, 0, cfg) / 2.0,
        (b[2] + b[3]) / 2.0,
        (b[1] + b[2]) / 2.0,
        (b[0] + b[1]) / 2.0,
        0.75 * b[0],
        0.25 * b[0],
    ]


def cps_curve_from_errors(error_traces, score: ScoreParams, zones: ZoneConfig):
    """Feed per-practice error traces through the scoring chain.

    Practice p is classified with practice count p (a single figure kind).
    Returns (per-practice CPS list, final CpsState).
    """
    state = CpsState()
    curve = []
    for p, trace in enumerate(error_traces):
        for err in trace:
            state = cps_update(state, classify(float(err), p, zones), score)
        curve.append(state.cps)
    return curve, state


def run_fig5(out_dir, practices: int = FIG5_PRACTICES,
             samples_per_practice: int = FIG5_SAMPLES_PER_PRACTICE) -> list[Path]:
    """CPS behavior across 200 practices for zero-gain and learning students.

    Six zero-gain baselines span the zone ladder; each positive learning
    gain is paired with the mid-ladder (level 4) baseline.
    """
    out = Path(out_dir)
    zones = ZoneConfig()
    score = ScoreParams()
    levels = fig5_baseline_levels(zones)
    written = []

    def run_one(name, level, gain, seed):
        learner = LearnerParams(g=gain, baseline_error=level,
                                noise_amp=FIG5_NOISE_FRACTION * level, seed=seed)
        traces = simulate_error_sequence(learner, practices, samples_per_practice)
        curve, _ = cps_curve_from_errors(traces, score, zones)
        lines = ["practice,mean_E,cps"]
        for p, (trace, cps) in enumerate(zip(traces, curve)):
            lines.append(f"{p},{float(np.mean(trace))!r},{cps!r}")
        path = out / f"{name}.csv"
        _write(path, "\n".join(lines) + "\n")
        written.append(path)

    for i, level in enumerate(levels, start=1):
        run_one(f"fig5_sim{i}", level, 0.0, seed=i)
    mid_level = levels[3]
    for gain in FIG5_LEARNER_GAINS:
        run_one(f"fig5_learner_g{gain}", mid_level, gain, seed=4)

    _manifest(out / "manifest.json", {
        "practices": practices,
        "samples_per_practice": samples_per_practice,
        "baseline_levels": levels,
        "learner_gains": list(FIG5_LEARNER_GAINS),
        "noise_fraction": FIG5_NOISE_FRACTION,
        "mid_level": mid_level,
        "alpha_z": score.alpha_z,
        "cps_m": score.cps_m,
        "zone_constants": [zones.c1, zones.c2, zones.c3],
    })
    written.append(out / "manifest.json")
    return written


# -- force-limit stop test ---------------------------------------------------------

def run_stoptest(out_file, robot: RobotParams | None = None,
                 human: HumanParams | None = None,
                 freeze_window: tuple = STOP_TEST_WINDOW,
                 duration: float = 10.0) -> Path:
    """Stop test with the default gains: freeze the partner over [2 s, 6 s]."""
    trace = stop_test(
        robot or RobotParams(),
        human or STOP_TEST_HUMAN,
        figure_by_kind("FWD"),
        Tempo(),
        freeze_window,
        duration=duration,
    )
    path = Path(out_file)
    _write(path, trace.to_csv())
    return path


# -- stability region sweep ---------------------------------------------------------

def run_stability_map(out_file, kh_range=(0.0, 500_000.0), dh_range=(0.0, 1200.0),
                      delay: float = 0.0, grid_dims=(100, 50),
                      robot: RobotParams | None = None) -> StabilityGrid:
    """Pole-map sweep over the human stiffness/damping box; writes the CSV."""
    base = robot or RobotParams()
    grid = stability_map(replace(base, loop_delay=delay), kh_range, dh_range, grid_dims)
    _write(Path(out_file), grid.to_csv())
    return grid


# -- paired adaptive-vs-constant cohort ------------------------------------------------

def cohort_config(seed: int, gain: float, initial_skill: float) -> SessionConfig:
    """Session configuration for one simulated cohort member.

    Single figure kind so the practice count (and zone tightening) tracks the
    session directly; coarse scoring grid so the CPS moves figure by figure
    the way the published per-subject trajectories do; zero intent noise so
    the paired comparison is exactly deterministic.
    """
    return SessionConfig(
        learner=LearnerParams(g=gain, noise_amp=0.0, seed=seed,
                              initial_skill=initial_skill),
        figure_sequence=("FWD",),
        practices=60,
        dt=0.002,
        scoring_hz=2.0,
    )


def total_variation(values) -> float:
    values = np.asarray(list(values), dtype=float)
    if len(values) < 2:
        return 0.0
    return float(np.abs(np.diff(values)).sum())


@dataclass
class CohortResult:
    learner: int
    seed: int
    gain: float
    initial_skill: float
    pt: SessionRecord
    constant: SessionRecord

    @property
    def tv_pt(self) -> float:
        return total_variation(r.cps for r in self.pt.samples)

    @property
    def tv_constant(self) -> float:
        return total_variation(r.cps for r in self.constant.samples)


def run_cohort(n_learners: int = 6, gains=None, out_dir=None) -> list[CohortResult]:
    """Paired adaptive/constant sessions per seeded learner.

    Each learner runs both arms from the same seed; gains and initial skill
    cycle so the cohort spans slow starters and quick adapters.
    """
    if n_learners < 2:
        raise ValueError("a cohort needs at least 2 learners")
    gains = list(gains) if gains else list(COHORT_GAINS)
    results = []
    for i in range(n_learners):
        gain = gains[i % len(gains)]
        skill = COHORT_SKILL_LEVELS[i % len(COHORT_SKILL_LEVELS)]
        cfg = cohort_config(seed=i, gain=gain, initial_skill=skill)
        pt = run_session(cfg)
        constant = run_session(cfg.with_mode("constant"))
        results.append(CohortResult(i, i, gain, skill, pt, constant))

    if out_dir is not None:
        out = Path(out_dir)
        for res in results:
            for arm, record in (("pt", res.pt), ("constant", res.constant)):
                lines = ["figure_index,cps_after"]
                lines += [f"{r.figure_index},{r.cps_after!r}" for r in record.figures]
                _write(out / f"learner{res.learner:02d}_{arm}.csv",
                       "\n".join(lines) + "\n")
        lines = ["learner,seed,gain,initial_skill,"
                 "final_cps_pt,final_cps_constant,tv_pt,tv_constant"]
        for res in results:
            lines.append(
                f"{res.learner},{res.seed},{res.gain!r},{res.initial_skill!r},"
                f"{res.pt.final_cps!r},{res.constant.final_cps!r},"
                f"{res.tv_pt!r},{res.tv_constant!r}"
            )
        _write(out / "summary.csv", "\n".join(lines) + "\n")
        _manifest(out / "manifest.json", {
            "n_learners": n_learners,
            "gains": gains,
            "skill_levels": list(COHORT_SKILL_LEVELS),
            "config": config_to_dict(cohort_config(0, gains[0], 0.0)),
        })
    return results


# -- offline scoring of recorded trajectories ---------------------------------------------

TRAJECTORY_HEADER = "t,vx,vy,vphi,vq1,vq2,vq3,vq4"


@dataclass
class OfflineReport:
    """Scoring of one externally recorded velocity trace against a figure."""

    figure_kind: str
    practice_n: int
    times: np.ndarray
    errors: np.ndarray
    zones: list
    cps_curve: np.ndarray
    final_state: CpsState
    accuracy: float
    mean_error: float
    bar_zone: object

    def to_csv(self) -> str:
        lines = ["t,E,zone,cps"]
        for t, e, z, c in zip(self.times, self.errors, self.zones, self.cps_curve):
            lines.append(f"{t!r},{e!r},{z.color},{c!r}")
        return "\n".join(lines) + "\n"


def parse_trajectory(text: str):
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != TRAJECTORY_HEADER:
        raise ValueError(f"trajectory file must start with header {TRAJECTORY_HEADER!r}")
    times, rows = [], []
    for ln in lines[1:]:
        cells = ln.split(",")
        if len(cells) != 8:
            raise ValueError(f"trajectory rows need 8 columns, got {len(cells)}: {ln!r}")
        values = [float(c) for c in cells]
        times.append(values[0])
        rows.append(values[1:])
    if len(times) < 2:
        raise ValueError("trajectory needs at least 2 samples")
    return np.asarray(times), np.asarray(rows)


def score_offline(trajectory_text: str, figure_kind: str, practice_n: int,
                  tempo: Tempo | None = None,
                  zones: ZoneConfig | None = None,
                  score: ScoreParams | None = None) -> OfflineReport:
    """Apply the scoring chain to a recorded velocity trace.

    The trace must cover one figure; a duration mismatch above 5% is an
    error. Uses the session error scale so recorded magnitudes land on the
    same zone ladder as live sessions.
    """
    tempo = tempo or Tempo()
    zones = zones or ZoneConfig(error_scale=SESSION_ERROR_SCALE)
    score = score or ScoreParams()
    figure = figure_by_kind(figure_kind)
    duration = figure_duration(figure, tempo)
    times, velocities = parse_trajectory(trajectory_text)
    span = times[-1] - times[0]
    if abs(span - duration) > 0.05 * duration:
        raise ValueError(
            f"trajectory spans {span:.3f} s but the figure lasts {duration:.3f} s "
            "(mismatch above 5%)"
        )
    rel_t = np.clip(times - times[0], 0.0, duration)
    desired = desired_velocity_series(figure, rel_t, tempo)

    state = CpsState()
    errors, zone_list, curve = [], [], []
    for vd, v in zip(desired, velocities):
        err = weighted_error(vd, v, zones)
        zone = classify(err, practice_n, zones)
        state = cps_update(state, zone, score)
        errors.append(err)
        zone_list.append(zone)
        curve.append(state.cps)
    mean_e, bar = figure_score(errors, practice_n, zones)
    return OfflineReport(
        figure_kind=figure.kind,
        practice_n=practice_n,
        times=np.asarray(times),
        errors=np.asarray(errors),
        zones=zone_list,
        cps_curve=np.asarray(curve),
        final_state=state,
        accuracy=accuracy(state, score),
        mean_error=mean_e,
        bar_zone=bar,
    )
