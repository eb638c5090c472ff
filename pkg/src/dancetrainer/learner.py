"""Simulated student: an error-correcting internal model plus the intent
policies that drive the coupled simulation.

The learner stores an intended velocity profile per figure kind and nudges
it toward the desired profile by a gradient step on the last execution
error. With gain 0 the intent never improves; with gain in (0, 1) the error
decays geometrically when execution is faithful.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .figures import (
    DanceFigure,
    N_AXES,
    StudentScaling,
    Tempo,
    desired_velocity_series,
    figure_duration,
)


@dataclass(frozen=True)
class LearnerParams:
    """Learning law and perturbation settings for the simulated student.

    noise_amp is the half-width of the uniform zero-mean perturbation: in the
    dynamics-free error-sequence mode it perturbs the error samples directly;
    in the coupled mode it perturbs the intent velocity (m/s, rad/s) on the
    planar axes. The seeded stream makes every run replayable.
    """

    g: float = 0.05
    baseline_error: float = 8.0
    noise_amp: float = 0.0
    seed: int = 0
    initial_skill: float = 0.0  # 0 = blank novice, 1 = intent starts at the target

    def __post_init__(self):
        if self.g < 0:
            raise ValueError("learning gain g must be >= 0")
        if self.baseline_error < 0:
            raise ValueError("baseline_error must be >= 0")
        if self.noise_amp < 0:
            raise ValueError("noise_amp must be >= 0")
        if not 0.0 <= self.initial_skill <= 1.0:
            raise ValueError("initial_skill must lie in [0, 1]")


@dataclass
class InternalModel:
    """Per-figure-kind intended velocity profiles on each figure's phase grid."""

    profiles: dict = field(default_factory=dict)  # kind -> (n_samples, 7) array

    def profile_for(self, figure: DanceFigure) -> np.ndarray:
        """Stored intent profile for a figure kind; starts at all-zero (novice)."""
        if figure.kind not in self.profiles:
            self.profiles[figure.kind] = np.zeros((len(figure.phases), N_AXES))
        return self.profiles[figure.kind]


def update_internal_model(model: InternalModel, figure: DanceFigure,
                          desired: np.ndarray, executed: np.ndarray,
                          g: float) -> InternalModel:
    """Gradient correction of the stored intent: intent += g * (desired - executed).

    desired and executed must live on the figure's phase grid.
    """
    intent = model.profile_for(figure)
    desired = np.asarray(desired, dtype=float)
    executed = np.asarray(executed, dtype=float)
    if desired.shape != intent.shape or executed.shape != intent.shape:
        raise ValueError(
            f"profile grids differ: intent {intent.shape}, desired {desired.shape}, "
            f"executed {executed.shape}"
        )
    model.profiles[figure.kind] = intent + g * (desired - executed)
    return model


def simulate_error_sequence(learner: LearnerParams, practices: int,
                            samples_per_practice: int) -> list[np.ndarray]:
    """Dynamics-free error traces: one array of E samples per practice.

    Practice p emits max(0, baseline_error * (1 - g)^p + noise) with uniform
    zero-mean noise from the seeded stream; deterministic per seed.
    """
    if practices < 1 or samples_per_practice < 1:
        raise ValueError("practices and samples_per_practice must be >= 1")
    rng = np.random.default_rng(learner.seed)
    decay = 1.0 - learner.g
    traces = []
    for p in range(practices):
        level = learner.baseline_error * decay**p
        noise = rng.uniform(-learner.noise_amp, learner.noise_amp,
                            size=samples_per_practice)
        traces.append(np.maximum(level + noise, 0.0))
    return traces


class CompliantIntent:
    """Intent velocity that tracks the desired trajectory exactly."""

    def __init__(self, desired_velocity_fn):
        self._desired = desired_velocity_fn

    def __call__(self, t: float) -> np.ndarray:
        return self._desired(t)


class FrozenIntent:
    """Wraps another intent policy, zeroing it inside the freeze window."""

    def __init__(self, inner, window: tuple):
        t0, t1 = window
        if t0 > t1:
            raise ValueError(f"freeze window {window} must have t0 <= t1")
        self.inner = inner
        self.window = (t0, t1)

    def __call__(self, t: float) -> np.ndarray:
        t0, t1 = self.window
        if t0 <= t < t1:
            return np.zeros(N_AXES)
        return self.inner(t)


class LearnerIntent:
    """Intent following the internal-model profile for the current figure.

    Call retarget() at each figure start; the policy then interpolates the
    stored profile over the figure duration, with optional per-sample noise
    on the planar axes. After the figure, update() applies the learning law
    against the executed (realized) velocity profile.
    """

    def __init__(self, params: LearnerParams, model: InternalModel | None = None,
                 rng: np.random.Generator | None = None):
        self.params = params
        self.model = model if model is not None else InternalModel()
        self.rng = rng if rng is not None else np.random.default_rng(params.seed)
        self._figure = None
        self._duration = None
        self._t_start = 0.0

    def retarget(self, figure: DanceFigure, tempo: Tempo, t_start: float):
        if figure.kind not in self.model.profiles and self.params.initial_skill > 0.0:
            self.model.profiles[figure.kind] = (
                self.params.initial_skill * figure.velocity_grid
            )
        self._figure = figure
        self._duration = figure_duration(figure, tempo)
        self._t_start = t_start

    def __call__(self, t: float) -> np.ndarray:
        if self._figure is None:
            return np.zeros(N_AXES)
        phase = min(max((t - self._t_start) / self._duration, 0.0), 1.0)
        profile = self.model.profile_for(self._figure)
        ph = self._figure.phase_grid
        v = np.array([np.interp(phase, ph, profile[:, i]) for i in range(N_AXES)])
        if self.params.noise_amp > 0.0:
            v[:3] += self.rng.uniform(-self.params.noise_amp,
                                      self.params.noise_amp, size=3)
        return v

    def update(self, figure: DanceFigure, tempo: Tempo,
               scaling: StudentScaling | None, executed_times: np.ndarray,
               executed_velocities: np.ndarray):
        """Apply one learning step from the realized coupled velocities.

        executed_times are relative to the figure start; velocities are
        resampled onto the figure's phase grid before the gradient step.
        """
        duration = figure_duration(figure, tempo)
        grid_times = figure.phase_grid * duration
        desired = desired_velocity_series(figure, grid_times, tempo, scaling)
        executed_times = np.asarray(executed_times, dtype=float)
        executed_velocities = np.asarray(executed_velocities, dtype=float)
        executed = np.column_stack([
            np.interp(grid_times, executed_times, executed_velocities[:, i])
            for i in range(N_AXES)
        ])
        update_internal_model(self.model, figure, desired, executed, self.params.g)


def intent_policy(kind: str, **kwargs):
    """Factory for the built-in intent policies.

    kind "compliant" needs desired_velocity_fn; "frozen" needs inner and
    window; "learner" needs params (and optionally model, rng).
    """
    if kind == "compliant":
        return CompliantIntent(kwargs["desired_velocity_fn"])
    if kind == "frozen":
        return FrozenIntent(kwargs["inner"], kwargs["window"])
    if kind == "learner":
        return LearnerIntent(kwargs["params"], kwargs.get("model"),
                             kwargs.get("rng"))
    raise ValueError(f"unknown intent policy kind {kind!r}")
