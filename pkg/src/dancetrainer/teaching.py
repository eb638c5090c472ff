"""Progressive-teaching adaptation: learning gain from the CPS history and
per-axis damping / force-gain updates at each figure boundary.

The learning gain is the normalized time-average of the clamped CPS; a high
average relaxes the guidance (less damping, weaker guidance force), a low one
restores it, so novices get strong guidance and improving partners get room
to move on their own. Damping moves alpha_d times slower than performance;
force moves alpha_f times slower still.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .scoring import CpsState, ScoreParams, Zone, face_color

PT_AXES = ("x", "y", "phi")


@dataclass(frozen=True)
class PtParams:
    """Adaptation sensitivities and per-axis damping bounds (x, y, phi)."""

    alpha_d: float = 4.0
    alpha_f: float = 50.0
    kd_min: tuple = (80.0, 80.0, 50.0)
    kd_max: tuple = (130.0, 130.0, 100.0)
    gamma_star_min: float = -1.0
    gamma_star_max: float = 1.0
    cps_m: float = 50.0

    def __post_init__(self):
        if self.alpha_d <= 0 or self.alpha_f <= 0:
            raise ValueError("alpha_d and alpha_f must be positive")
        if len(self.kd_min) != len(PT_AXES) or len(self.kd_max) != len(PT_AXES):
            raise ValueError(f"damping bounds need one entry per axis {PT_AXES}")
        if any(lo >= hi for lo, hi in zip(self.kd_min, self.kd_max)):
            raise ValueError("kd_min must be < kd_max per axis")
        if self.gamma_star_min >= self.gamma_star_max:
            raise ValueError("gamma_star_min must be < gamma_star_max")
        if self.cps_m <= 0:
            raise ValueError("cps_m must be positive")


@dataclass(frozen=True)
class FeedbackEvent:
    """One cognitive-feedback emission at a figure boundary."""

    kind: str  # "bar_color" | "face_color"
    color: Zone
    figure_id: str
    practice_n: int


@dataclass(frozen=True)
class PtState:
    """Adaptation state: learning gain, current gains, practice counters."""

    gamma_star: float = 0.0
    gamma: float = 0.0
    kd_current: tuple = (130.0, 130.0, 100.0)
    kf_current: tuple = (1.0, 1.0, 1.0)
    practice_counts: tuple = ()  # ((kind, count), ...) kept hashable
    pt_mode: bool = True

    def practice_count(self, kind: str) -> int:
        return dict(self.practice_counts).get(kind, 0)

    def _bump_practice(self, kind: str) -> tuple:
        counts = dict(self.practice_counts)
        counts[kind] = counts.get(kind, 0) + 1
        return tuple(sorted(counts.items()))


def learning_gain(cps_state: CpsState, params: PtParams) -> tuple[float, float]:
    """Normalized CPS time-average: (gamma_star, gamma).

    gamma_star is the clamped-CPS running sum divided by cps_m * n_s, so it
    lies in [-1, 1]; gamma maps it onto [0, 1] through the configured bounds.
    """
    if cps_state.n_s < 1:
        raise ValueError("learning gain undefined before the first scored sample")
    gamma_star = cps_state.sum_cps / (params.cps_m * cps_state.n_s)
    span = params.gamma_star_max - params.gamma_star_min
    gamma = (gamma_star - params.gamma_star_min) / span
    return gamma_star, min(max(gamma, 0.0), 1.0)


def adapt_damping(gamma: float, params: PtParams) -> tuple:
    """Per-axis damping for a learning gain in [0, 1].

    kd = kd_min + (kd_max - kd_min) * (1 - gamma / alpha_d), clamped to the
    bounds; alpha_d > 1 means even a perfect performer keeps some damping.
    """
    if not 0.0 <= gamma <= 1.0:
        raise ValueError("gamma must lie in [0, 1]")
    out = []
    for lo, hi in zip(params.kd_min, params.kd_max):
        kd = lo + (hi - lo) * (1.0 - gamma / params.alpha_d)
        out.append(min(max(kd, lo), hi))
    return tuple(out)


def adapt_force_gain(gamma: float, params: PtParams) -> tuple:
    """Per-axis force gain: kf = 1 - gamma / alpha_f, clamped to [0, 1]."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError("gamma must lie in [0, 1]")
    kf = min(max(1.0 - gamma / params.alpha_f, 0.0), 1.0)
    return (kf,) * len(PT_AXES)


def reset_for_student(params: PtParams, initial_kd=None, initial_kf=None,
                      pt_mode: bool = True) -> PtState:
    """Fresh per-student state: zero counters, full guidance by default."""
    kd = tuple(initial_kd) if initial_kd is not None else tuple(params.kd_max)
    kf = tuple(initial_kf) if initial_kf is not None else (1.0,) * len(PT_AXES)
    if len(kd) != len(PT_AXES) or len(kf) != len(PT_AXES):
        raise ValueError(f"initial gains need one entry per axis {PT_AXES}")
    for v, lo, hi in zip(kd, params.kd_min, params.kd_max):
        if not lo <= v <= hi:
            raise ValueError(f"initial damping {v} outside [{lo}, {hi}]")
    if any(not 0.0 <= v <= 1.0 for v in kf):
        raise ValueError("initial force gains must lie in [0, 1]")
    return PtState(kd_current=kd, kf_current=kf, pt_mode=pt_mode)


def pt_tick(pt: PtState, cps_state: CpsState, figure_id: str, figure_kind: str,
            figure_result: tuple[float, Zone], params: PtParams,
            score_params: ScoreParams) -> tuple[PtState, list[FeedbackEvent]]:
    """Per-figure adaptation tick.

    Bumps the figure-kind practice counter, recomputes the learning gain and
    gains when pt_mode is on (constant-baseline sessions keep their gains),
    and emits the bar-color and face-color feedback events.
    """
    practice_n = pt.practice_count(figure_kind)
    new_counts = pt._bump_practice(figure_kind)
    if pt.pt_mode and cps_state.n_s >= 1:
        gamma_star, gamma = learning_gain(cps_state, params)
        new = replace(
            pt,
            gamma_star=gamma_star,
            gamma=gamma,
            kd_current=adapt_damping(gamma, params),
            kf_current=adapt_force_gain(gamma, params),
            practice_counts=new_counts,
        )
    else:
        new = replace(pt, practice_counts=new_counts)
    _, bar_zone = figure_result
    events = [
        FeedbackEvent("bar_color", bar_zone, figure_id, practice_n),
        FeedbackEvent("face_color", face_color(cps_state.cps, score_params),
                      figure_id, practice_n),
    ]
    return new, events
