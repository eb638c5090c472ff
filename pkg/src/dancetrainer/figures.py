"""Waltz figure library: timed desired-velocity profiles and the motion generator.

The motion space has 7 axes, ordered (x, y, phi, q1, q2, q3, q4): planar
translation in m/s, base rotation in rad/s, and four upper-body joints in
rad/s. Figures store a velocity profile over normalized phase in [0, 1];
real-time velocities come out of :func:`desired_velocity`, which rescales
phase by the figure duration and applies the per-student adjustment.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

N_AXES = 7
AXIS_NAMES = ("x", "y", "phi", "q1", "q2", "q3", "q4")

FIGURE_KINDS = ("FWD", "BWD", "CCLF", "CCLB", "CCRF", "CCRB")

# Synthetic box-step geometry: one 0.45 m step per beat group of 3 beats.
STEP_LENGTH = 0.45
BEATS_PER_GROUP = 3

_FILE_HEADER = "phase,vx,vy,vphi,vq1,vq2,vq3,vq4"


class FigureFormatError(ValueError):
    """Raised when a figure file or profile violates the format contract."""


@dataclass(frozen=True)
class Tempo:
    """Dance tempo in beats per minute."""

    bpm: float = 90.0

    def __post_init__(self):
        if not (self.bpm > 0 and math.isfinite(self.bpm)):
            raise ValueError(f"bpm must be positive and finite, got {self.bpm}")


@dataclass(frozen=True)
class StudentScaling:
    """Per-student trajectory adjustment: axis scale factors and stop flags.

    k_s scales each axis of the stored profile (step length, reach);
    mu_s is a binary stop signal per axis (0 freezes that axis entirely).
    """

    k_s: tuple = (1.0,) * N_AXES
    mu_s: tuple = (1,) * N_AXES

    def __post_init__(self):
        if len(self.k_s) != N_AXES or len(self.mu_s) != N_AXES:
            raise ValueError("k_s and mu_s must have 7 components")
        if any(not math.isfinite(k) or k < 0 for k in self.k_s):
            raise ValueError("k_s components must be finite and >= 0")
        if any(m not in (0, 1) for m in self.mu_s):
            raise ValueError("mu_s components must be 0 or 1")


@dataclass(frozen=True)
class DanceFigure:
    """One Waltz figure as a phase-indexed desired-velocity profile.

    phases are strictly increasing from 0 to 1; velocities is the matching
    (n_samples, 7) array, linearly interpolated between samples.
    """

    id: str
    kind: str
    beats: int
    phases: tuple = field(repr=False)
    velocities: tuple = field(repr=False)  # tuple of 7-tuples, row per phase

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise FigureFormatError(f"unknown figure kind {self.kind!r}")
        if self.beats < 1:
            raise FigureFormatError("beats must be >= 1")
        ph = np.asarray(self.phases, dtype=float)
        vel = np.asarray(self.velocities, dtype=float)
        if ph.ndim != 1 or len(ph) < 2:
            raise FigureFormatError("profile needs at least 2 samples")
        if vel.shape != (len(ph), N_AXES):
            raise FigureFormatError(
                f"velocity rows must have {N_AXES} components, got shape {vel.shape}"
            )
        if not np.all(np.isfinite(ph)) or not np.all(np.isfinite(vel)):
            raise FigureFormatError("profile contains non-finite values")
        if ph[0] != 0.0 or ph[-1] != 1.0:
            raise FigureFormatError("phase grid must start at 0 and end at 1")
        if np.any(np.diff(ph) <= 0):
            raise FigureFormatError("phases must be strictly increasing")
        if self.kind in ("CCLF", "CCLB", "CCRF", "CCRB"):
            disp = np.trapezoid(vel[:, :2], ph, axis=0)
            if np.hypot(disp[0], disp[1]) == 0.0:
                raise FigureFormatError("close-change figures must displace in x-y")

    @property
    def phase_grid(self) -> np.ndarray:
        return np.asarray(self.phases, dtype=float)

    @property
    def velocity_grid(self) -> np.ndarray:
        return np.asarray(self.velocities, dtype=float)

    def velocity_at_phase(self, phase: float) -> np.ndarray:
        """Raw profile velocity at a phase in [0, 1] (linear interpolation)."""
        ph = self.phase_grid
        vel = self.velocity_grid
        return np.array([np.interp(phase, ph, vel[:, i]) for i in range(N_AXES)])

    def net_displacement(self, tempo: Tempo) -> np.ndarray:
        """Per-axis displacement over one figure (trapezoid rule)."""
        T = figure_duration(self, tempo)
        return T * np.trapezoid(self.velocity_grid, self.phase_grid, axis=0)


def figure_duration(figure: DanceFigure, tempo: Tempo) -> float:
    """Duration of one figure in seconds: beats * 60 / bpm."""
    return figure.beats * 60.0 / tempo.bpm


def desired_velocity(
    figure: DanceFigure,
    t: float,
    tempo: Tempo,
    scaling: StudentScaling | None = None,
) -> np.ndarray:
    """Student-adapted desired velocity at time t within one figure.

    Componentwise mu_s[i] * k_s[i] * v_profile[i](t / duration). Raises
    ValueError when t falls outside [0, duration].
    """
    duration = figure_duration(figure, tempo)
    if not 0.0 <= t <= duration:
        raise ValueError(f"t={t} outside figure duration [0, {duration}]")
    v = figure.velocity_at_phase(t / duration)
    if scaling is None:
        return v
    return np.asarray(scaling.mu_s, dtype=float) * np.asarray(scaling.k_s, dtype=float) * v


def desired_velocity_series(
    figure: DanceFigure,
    times: np.ndarray,
    tempo: Tempo,
    scaling: StudentScaling | None = None,
) -> np.ndarray:
    """Vectorized desired_velocity over a time array; returns (len(times), 7)."""
    duration = figure_duration(figure, tempo)
    times = np.asarray(times, dtype=float)
    if times.size and (times.min() < 0.0 or times.max() > duration):
        raise ValueError("times outside figure duration")
    phases = times / duration
    ph = figure.phase_grid
    vel = figure.velocity_grid
    out = np.column_stack([np.interp(phases, ph, vel[:, i]) for i in range(N_AXES)])
    if scaling is not None:
        out *= np.asarray(scaling.mu_s, dtype=float) * np.asarray(scaling.k_s, dtype=float)
    return out


RAMP_FRACTION = 0.25  # of each move: raised-cosine ramp up, cruise, ramp down


def _ramped_plateau(phases: np.ndarray, start: float, end: float,
                    cruise: float, ramp: float = RAMP_FRACTION) -> np.ndarray:
    """Velocity move: raised-cosine ramp 0 -> cruise, hold, ramp back to 0.

    ramp is the fraction of [start, end] spent in each ramp; the move
    integrates to cruise * (end - start) * (1 - ramp) in phase units.
    """
    u = (phases - start) / (end - start)
    out = np.zeros_like(phases)
    rising = (u >= 0.0) & (u < ramp)
    flat = (u >= ramp) & (u <= 1.0 - ramp)
    falling = (u > 1.0 - ramp) & (u <= 1.0)
    out[rising] = cruise * 0.5 * (1.0 - np.cos(math.pi * u[rising] / ramp))
    out[flat] = cruise
    out[falling] = cruise * 0.5 * (1.0 - np.cos(math.pi * (1.0 - u[falling]) / ramp))
    return out


def _make_figure(fig_id: str, kind: str, beats: int, moves) -> DanceFigure:
    """Build a figure from (axis, start_phase, end_phase, displacement) moves.

    displacement is the target net motion over the move at the canonical
    90 bpm tempo; the cruise velocity follows from the ramp geometry.
    """
    phases = np.linspace(0.0, 1.0, 81)
    vel = np.zeros((len(phases), N_AXES))
    duration_canonical = beats * 60.0 / 90.0
    for axis, start, end, displacement in moves:
        span_s = duration_canonical * (end - start)
        cruise = displacement / (span_s * (1.0 - RAMP_FRACTION))
        vel[:, axis] += _ramped_plateau(phases, start, end, cruise)
    return DanceFigure(
        id=fig_id,
        kind=kind,
        beats=beats,
        phases=tuple(phases.tolist()),
        velocities=tuple(tuple(row) for row in vel.tolist()),
    )


def builtin_figures() -> list[DanceFigure]:
    """The six built-in Waltz figures: forward/backward walks plus the four
    close-change combinations (left/right x forward/backward).

    Profiles are synthetic raised-cosine box steps, 0.45 m per beat group;
    close changes move one step along x then one step along y; upper-body
    axes carry zero velocity.
    """
    walk = BEATS_PER_GROUP  # 3 beats
    cc = 2 * BEATS_PER_GROUP  # 6 beats
    s = STEP_LENGTH
    return [
        _make_figure("walk-forward", "FWD", walk, [(0, 0.0, 1.0, s)]),
        _make_figure("walk-backward", "BWD", walk, [(0, 0.0, 1.0, -s)]),
        _make_figure("close-change-left-forward", "CCLF", cc,
                     [(0, 0.0, 0.5, s), (1, 0.5, 1.0, s)]),
        _make_figure("close-change-left-backward", "CCLB", cc,
                     [(0, 0.0, 0.5, -s), (1, 0.5, 1.0, s)]),
        _make_figure("close-change-right-forward", "CCRF", cc,
                     [(0, 0.0, 0.5, s), (1, 0.5, 1.0, -s)]),
        _make_figure("close-change-right-backward", "CCRB", cc,
                     [(0, 0.0, 0.5, -s), (1, 0.5, 1.0, -s)]),
    ]


def figure_by_kind(kind: str) -> DanceFigure:
    """Built-in figure for a kind name (case-insensitive)."""
    kind = kind.upper()
    for fig in builtin_figures():
        if fig.kind == kind:
            return fig
    raise KeyError(f"no built-in figure of kind {kind!r}")


def dump_figure(figure: DanceFigure) -> str:
    """Serialize a figure to the text table format accepted by load_figure."""
    lines = [f"# kind={figure.kind} beats={figure.beats}", _FILE_HEADER]
    for phase, row in zip(figure.phases, figure.velocities):
        lines.append(",".join(repr(float(v)) for v in (phase, *row)))
    return "\n".join(lines) + "\n"


def load_figure(source) -> DanceFigure:
    """Parse a figure from a byte stream, text stream, or string.

    Format: a metadata comment line `# kind=<KIND> beats=<N>`, a header row
    `phase,vx,vy,vphi,vq1,vq2,vq3,vq4`, then one comma-separated sample per
    line. Raises FigureFormatError on malformed input.
    """
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        text = source
    else:
        data = source.read()
        text = data.decode("utf-8") if isinstance(data, bytes) else data
    lines = [ln.strip() for ln in io.StringIO(text) if ln.strip()]
    if len(lines) < 4:
        raise FigureFormatError("figure file too short")
    meta = lines[0]
    if not meta.startswith("#"):
        raise FigureFormatError("missing metadata line '# kind=<KIND> beats=<N>'")
    fields = dict(
        part.split("=", 1) for part in meta.lstrip("#").split() if "=" in part
    )
    if "kind" not in fields or "beats" not in fields:
        raise FigureFormatError("metadata line must declare kind and beats")
    try:
        beats = int(fields["beats"])
    except ValueError as exc:
        raise FigureFormatError(f"beats is not an integer: {fields['beats']!r}") from exc
    if lines[1] != _FILE_HEADER:
        raise FigureFormatError(f"expected header {_FILE_HEADER!r}, got {lines[1]!r}")
    phases = []
    rows = []
    for ln in lines[2:]:
        cells = ln.split(",")
        if len(cells) != 1 + N_AXES:
            raise FigureFormatError(
                f"sample rows need {1 + N_AXES} columns, got {len(cells)}: {ln!r}"
            )
        try:
            values = [float(c) for c in cells]
        except ValueError as exc:
            raise FigureFormatError(f"non-numeric cell in row {ln!r}") from exc
        phases.append(values[0])
        rows.append(tuple(values[1:]))
    return DanceFigure(
        id=fields.get("id", f"{fields['kind'].lower()}-custom"),
        kind=fields["kind"],
        beats=beats,
        phases=tuple(phases),
        velocities=tuple(rows),
    )
