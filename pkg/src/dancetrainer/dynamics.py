"""Stiffness-free impedance control, the coupled robot-human simulation,
the force-limited stop behavior, and the closed-loop pole analysis.

The control law drives the coupled contact-space motion toward a desired
velocity while regulating the interaction force toward a bounded guidance
force; there is intentionally no position stiffness, so a partner who
resists stalls the robot at the force limit and a steady position error is
allowed by design (the closed loop keeps a pole at the origin).

Convention: F_i is the interaction force the robot applies to the partner,
positive along the axis of motion. The partner is modeled as a spring-damper
(K_h, D_h) anchored at an intent trajectory; the intent is supplied by a
policy (compliant follower, frozen stop, simulated learner, live pointer).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .figures import DanceFigure, N_AXES, Tempo, figure_duration

PLANAR_AXES = (0, 1, 2)  # x, y, phi carry the contact force; q1-q4 do not

MAX_STEP_DT = 0.01  # integrator accuracy guard
ORIGIN_POLE_EPS = 1e-9  # a max real part below this counts as stable


class SimulationFault(RuntimeError):
    """Raised when the coupled state stops being finite."""


@dataclass(frozen=True)
class RobotParams:
    """Per-axis interaction-control parameters of the guidance robot.

    m_d: desired (= actual) inertia per axis, kg or kg m^2.
    k_d: damping gains, N s/m or N m s/rad.
    k_f: force gains in [0, 1].
    f_d: desired-interaction-force interval (lower <= 0 <= upper) per axis.
    eta_r: nonlinear-dynamics bias term, force units (default zero).
    actuator_lag: first-order inner-loop time constant T_a, seconds.
    loop_delay: force-feedback delay, seconds.
    """

    m_d: tuple = (100.0, 100.0, 40.0, 20.0, 20.0, 20.0, 20.0)
    k_d: tuple = (130.0, 130.0, 100.0, 50.0, 50.0, 50.0, 50.0)
    k_f: tuple = (1.0,) * N_AXES
    f_d: tuple = (
        (-60.0, 32.0),
        (-34.0, 34.0),
        (-10.0, 10.0),
        (0.0, 0.0),
        (0.0, 0.0),
        (0.0, 0.0),
        (0.0, 0.0),
    )
    eta_r: tuple = (0.0,) * N_AXES
    actuator_lag: float = 0.0
    loop_delay: float = 0.0

    def __post_init__(self):
        for name in ("m_d", "k_d", "k_f", "eta_r"):
            if len(getattr(self, name)) != N_AXES:
                raise ValueError(f"{name} must have {N_AXES} components")
        if any(m <= 0 for m in self.m_d):
            raise ValueError("m_d components must be positive")
        if any(k <= 0 for k in self.k_d):
            raise ValueError("k_d components must be positive")
        if any(not 0.0 <= k <= 1.0 for k in self.k_f):
            raise ValueError("k_f components must lie in [0, 1]")
        if len(self.f_d) != N_AXES or any(len(iv) != 2 for iv in self.f_d):
            raise ValueError("f_d must be 7 (lower, upper) intervals")
        if any(not (lo <= 0.0 <= hi) for lo, hi in self.f_d):
            raise ValueError("each f_d interval must satisfy lower <= 0 <= upper")
        if self.actuator_lag < 0 or self.loop_delay < 0:
            raise ValueError("actuator_lag and loop_delay must be >= 0")

    def with_gains(self, k_d=None, k_f=None) -> "RobotParams":
        """Copy with replaced damping and/or force gains (7-vectors)."""
        return replace(
            self,
            k_d=tuple(k_d) if k_d is not None else self.k_d,
            k_f=tuple(k_f) if k_f is not None else self.k_f,
        )


@dataclass(frozen=True)
class HumanParams:
    """Partner model: inertia plus a spring-damper anchored at the intent."""

    m_h: float = 70.0
    k_h: float = 300.0
    d_h: float = 60.0

    def __post_init__(self):
        if self.m_h <= 0:
            raise ValueError("m_h must be positive")
        if self.k_h < 0 or self.d_h < 0:
            raise ValueError("k_h and d_h must be >= 0")


@dataclass(frozen=True)
class CoupledState:
    """Instantaneous contact-space state of the robot-human couple."""

    t: float = 0.0
    x_c: tuple = (0.0,) * N_AXES
    xdot_c: tuple = (0.0,) * N_AXES
    x_h: tuple = (0.0,) * N_AXES
    xdot_h: tuple = (0.0,) * N_AXES
    f_i: tuple = (0.0,) * N_AXES

    def as_arrays(self):
        return (
            np.asarray(self.x_c, dtype=float),
            np.asarray(self.xdot_c, dtype=float),
            np.asarray(self.x_h, dtype=float),
            np.asarray(self.xdot_h, dtype=float),
            np.asarray(self.f_i, dtype=float),
        )


def effective_desired_force(xdot_d, robot: RobotParams) -> np.ndarray:
    """Direction-resolved guidance force per axis.

    Takes the interval bound whose sign matches the desired velocity on that
    axis (upper for forward motion, lower for backward, zero at rest), so the
    guidance always pushes along the desired direction.
    """
    xdot_d = np.asarray(xdot_d, dtype=float)
    out = np.zeros(N_AXES)
    for i in range(N_AXES):
        if xdot_d[i] > 0.0:
            out[i] = robot.f_d[i][1]
        elif xdot_d[i] < 0.0:
            out[i] = robot.f_d[i][0]
    return out


def control_accel(state: CoupledState, xdot_d, xddot_d, robot: RobotParams,
                  f_i=None) -> np.ndarray:
    """Commanded coupled acceleration from the interaction control law.

    xddot = xddot_d + (k_d (xdot_d - xdot_c) + k_f f_d_eff - f_i - eta_r) / m_d
    componentwise for the diagonal model. f_i defaults to the state's force;
    passing it explicitly supports delayed force feedback.
    """
    xdot_c = np.asarray(state.xdot_c, dtype=float)
    if f_i is None:
        f_i = np.asarray(state.f_i, dtype=float)
    xdot_d = np.asarray(xdot_d, dtype=float)
    xddot_d = np.asarray(xddot_d, dtype=float)
    k_d = np.asarray(robot.k_d, dtype=float)
    k_f = np.asarray(robot.k_f, dtype=float)
    m_d = np.asarray(robot.m_d, dtype=float)
    eta = np.asarray(robot.eta_r, dtype=float)
    f_guid = k_f * effective_desired_force(xdot_d, robot)
    return xddot_d + (k_d * (xdot_d - xdot_c) + f_guid - f_i - eta) / m_d


def human_force(state: CoupledState, human: HumanParams) -> np.ndarray:
    """Spring-damper contact force on the planar axes; zero on q1-q4."""
    x_c, xdot_c, x_h, xdot_h, _ = state.as_arrays()
    f = np.zeros(N_AXES)
    for i in PLANAR_AXES:
        f[i] = human.k_h * (x_c[i] - x_h[i]) + human.d_h * (xdot_c[i] - xdot_h[i])
    return f


class CoupledSimulation:
    """Fixed-step semi-implicit Euler integration of the coupled couple.

    Owns the actuator-lag filter state and the force-feedback delay line, so
    stepping is deterministic given the construction arguments and the input
    sequence. The intent policy is a callable t -> intent velocity 7-vector;
    intent position is integrated internally. State lives in flat arrays for
    the hot loop; `state` materializes the value-typed snapshot.
    """

    def __init__(self, robot: RobotParams, human: HumanParams, dt: float,
                 intent_velocity, state: CoupledState | None = None):
        if not 0.0 < dt <= MAX_STEP_DT:
            raise ValueError(f"dt must be in (0, {MAX_STEP_DT}] s, got {dt}")
        self.human = human
        self.dt = dt
        self.intent_velocity = intent_velocity
        self.robot = robot  # property setter caches the per-axis arrays
        self.state = state if state is not None else CoupledState()
        self._accel = np.zeros(N_AXES)  # actuator-lag filter memory
        delay_steps = int(round(robot.loop_delay / dt)) if robot.loop_delay > 0 else 0
        self._force_ring = [np.zeros(N_AXES) for _ in range(delay_steps)] if delay_steps else None
        self._ring_idx = 0

    @property
    def robot(self) -> RobotParams:
        return self._robot

    @robot.setter
    def robot(self, robot: RobotParams):
        self._robot = robot
        self._m_d = np.asarray(robot.m_d, dtype=float)
        self._k_d = np.asarray(robot.k_d, dtype=float)
        self._k_f = np.asarray(robot.k_f, dtype=float)
        self._eta = np.asarray(robot.eta_r, dtype=float)
        self._f_upper = np.array([iv[1] for iv in robot.f_d])
        self._f_lower = np.array([iv[0] for iv in robot.f_d])

    @property
    def state(self) -> CoupledState:
        return CoupledState(
            t=self._t,
            x_c=tuple(self._x_c.tolist()),
            xdot_c=tuple(self._xdot_c.tolist()),
            x_h=tuple(self._x_h.tolist()),
            xdot_h=tuple(self._xdot_h.tolist()),
            f_i=tuple(self._f_i.tolist()),
        )

    @state.setter
    def state(self, s: CoupledState):
        self._t = s.t
        self._x_c, self._xdot_c, self._x_h, self._xdot_h, self._f_i = (
            a.copy() for a in s.as_arrays()
        )

    @property
    def t(self) -> float:
        return self._t

    @property
    def coupled_velocity(self) -> np.ndarray:
        return self._xdot_c.copy()

    def _delayed_force(self, f_now: np.ndarray) -> np.ndarray:
        if self._force_ring is None:
            return f_now
        ring = self._force_ring
        oldest = ring[self._ring_idx]
        ring[self._ring_idx] = f_now
        self._ring_idx = (self._ring_idx + 1) % len(ring)
        return oldest

    def reanchor_intent(self):
        """Re-center the intent position on the coupled position.

        Called between figures: the partner regroups where they actually
        stand, so spring stretch never accumulates across figures.
        """
        self._x_h = self._x_c.copy()

    def step(self, xdot_d, xddot_d, xdot_h=None, pose=None) -> CoupledState:
        """Advance one fixed step and return the new state.

        xdot_h overrides the intent policy for this step when given (used by
        the session engine, which precomputes intent series per figure).
        pose = (x_h, xdot_h) sets the intent outright instead of integrating
        it (live pointer input).
        """
        dt = self.dt
        xdot_d = np.asarray(xdot_d, dtype=float)
        xddot_d = np.asarray(xddot_d, dtype=float)

        if pose is not None:
            x_h = np.asarray(pose[0], dtype=float)
            xdot_h_new = np.asarray(pose[1], dtype=float)
        else:
            if xdot_h is None:
                xdot_h_new = np.asarray(self.intent_velocity(self._t), dtype=float)
            else:
                xdot_h_new = np.asarray(xdot_h, dtype=float)
            x_h = self._x_h + xdot_h_new * dt

        f_now = np.zeros(N_AXES)
        kh, dh = self.human.k_h, self.human.d_h
        for i in PLANAR_AXES:
            f_now[i] = kh * (self._x_c[i] - x_h[i]) + dh * (self._xdot_c[i] - xdot_h_new[i])
        f_fb = self._delayed_force(f_now)

        f_guid = self._k_f * np.where(
            xdot_d > 0.0, self._f_upper, np.where(xdot_d < 0.0, self._f_lower, 0.0)
        )
        a_cmd = xddot_d + (
            self._k_d * (xdot_d - self._xdot_c) + f_guid - f_fb - self._eta
        ) / self._m_d
        if self._robot.actuator_lag > 0.0:
            self._accel += (dt / self._robot.actuator_lag) * (a_cmd - self._accel)
            a = self._accel
        else:
            a = a_cmd

        self._xdot_c = self._xdot_c + a * dt
        self._x_c = self._x_c + self._xdot_c * dt
        self._x_h = x_h
        self._xdot_h = xdot_h_new
        self._f_i = f_now
        self._t += dt
        # NaN/Inf in any component poisons this sum
        if not math.isfinite(float(self._x_c.sum() + self._xdot_c.sum() + f_now.sum())):
            raise SimulationFault(f"non-finite state at t={self._t:.4f}")
        return self.state


def step(state: CoupledState, xdot_d, xddot_d, robot: RobotParams,
         human: HumanParams, intent_velocity, dt: float) -> CoupledState:
    """Single lag-free, delay-free step; see CoupledSimulation for loops."""
    sim = CoupledSimulation(robot, human, dt, intent_velocity, state=state)
    return sim.step(xdot_d, xddot_d)


@dataclass
class StopTestTrace:
    """Sampled planar time series from a stop test."""

    t: np.ndarray
    xdot_d: np.ndarray  # (n, 3): desired x, y, phi velocity
    xdot_c: np.ndarray  # (n, 3): coupled velocity
    f_i: np.ndarray     # (n, 3): interaction force
    freeze_window: tuple = (0.0, 0.0)

    def to_csv(self) -> str:
        header = "t,vxd,vx,fix,vyd,vy,fiy,vphid,vphi,fiphi"
        lines = [header]
        for k in range(len(self.t)):
            cells = [self.t[k]]
            for i in range(3):
                cells += [self.xdot_d[k, i], self.xdot_c[k, i], self.f_i[k, i]]
            lines.append(",".join(repr(float(c)) for c in cells))
        return "\n".join(lines) + "\n"


def _figure_velocity_fn(figure: DanceFigure, tempo: Tempo):
    """Desired velocity over a run that repeats the figure back to back."""
    duration = figure_duration(figure, tempo)
    ph = figure.phase_grid
    vel = figure.velocity_grid

    def xdot_d(t: float) -> np.ndarray:
        phase = (t % duration) / duration
        return np.array([np.interp(phase, ph, vel[:, i]) for i in range(N_AXES)])

    return xdot_d, duration


def stop_test(robot: RobotParams, human: HumanParams, figure: DanceFigure,
              tempo: Tempo, freeze_window: tuple, duration: float = 10.0,
              dt: float = 0.001, sample_every: int = 10) -> StopTestTrace:
    """Force-limit interaction test: freeze the partner intent mid-run.

    The intent velocity tracks the repeated figure outside [t0, t1] and is
    zero inside (position held); after the freeze the intent resumes from the
    held position. Returns the sampled planar trace.
    """
    t0, t1 = freeze_window
    if not (0.0 <= t0 <= t1 <= duration):
        raise ValueError(f"freeze window {freeze_window} outside [0, {duration}]")
    track, _ = _figure_velocity_fn(figure, tempo)

    def intent(t: float) -> np.ndarray:
        if t0 <= t < t1:
            return np.zeros(N_AXES)
        return track(t)

    sim = CoupledSimulation(robot, human, dt, intent)
    n_steps = int(round(duration / dt))
    ts, vds, vcs, fis = [], [], [], []
    for k in range(n_steps):
        t = k * dt
        vd = track(t)
        new = sim.step(vd, _numeric_accel(track, t, dt))
        if k % sample_every == 0:
            ts.append(new.t)
            vds.append(vd[:3])
            vcs.append(np.asarray(new.xdot_c)[:3])
            fis.append(np.asarray(new.f_i)[:3])
    return StopTestTrace(
        t=np.asarray(ts),
        xdot_d=np.asarray(vds),
        xdot_c=np.asarray(vcs),
        f_i=np.asarray(fis),
        freeze_window=(t0, t1),
    )


def _numeric_accel(velocity_fn, t: float, dt: float) -> np.ndarray:
    """Finite-difference desired acceleration used as feedforward."""
    t_lo = max(t - dt, 0.0)
    t_hi = t + dt
    return (velocity_fn(t_hi) - velocity_fn(t_lo)) / (t_hi - t_lo)


def characteristic_polynomial(robot: RobotParams, human: HumanParams,
                              axis: str) -> np.ndarray:
    """Closed-loop characteristic polynomial coefficients, descending degree.

    Loop: velocity admittance m_d s + k_d, human load m_h s^2 + d_h s + k_h
    riding the contact, first-order actuator lag 1/(T_a s + 1), and the force
    feedback delayed by the first-order Pade approximant
    (1 - s T/2) / (1 + s T/2):

        (m_d s (T_a s + 1) + k_d) * s * (1 + s T/2)
            + (1 - s T/2) * (m_h s^2 + d_h s + k_h) = 0

    The bare factor s is the velocity-level integrator pole at the origin.
    """
    try:
        i = {"x": 0, "y": 1, "phi": 2}[axis]
    except KeyError:
        raise ValueError(f"axis must be one of x, y, phi; got {axis!r}") from None
    m_d = robot.m_d[i]
    k_d = robot.k_d[i]
    t_a = robot.actuator_lag
    t_half = robot.loop_delay / 2.0

    admittance = np.array([m_d * t_a, m_d, k_d])      # m_d s (T_a s + 1) + k_d
    integ_delay = np.array([t_half, 1.0, 0.0])        # s (1 + s T/2)
    pade_num = np.array([-t_half, 1.0])               # 1 - s T/2
    load = np.array([human.m_h, human.d_h, human.k_h])

    poly = np.polyadd(np.polymul(admittance, integ_delay),
                      np.polymul(pade_num, load))
    nz = np.flatnonzero(np.abs(poly) > 0.0)
    if len(nz) == 0:
        raise ValueError("characteristic polynomial is identically zero")
    return poly[nz[0]:]


def poles(coeffs) -> np.ndarray:
    """All roots of a real polynomial (descending coefficients).

    Companion-matrix roots refined by a few Newton steps so that every root
    satisfies |p(root)| <= 1e-8 * max|coeff|.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    nz = np.flatnonzero(np.abs(coeffs) > 0.0)
    if len(nz) == 0:
        raise ValueError("zero polynomial has no well-defined roots")
    coeffs = coeffs[nz[0]:]
    degree = len(coeffs) - 1
    if degree == 0:
        return np.array([], dtype=complex)
    if degree > 8:
        raise ValueError(f"degree {degree} exceeds the supported maximum of 8")
    scale = np.max(np.abs(coeffs))
    monic = coeffs / scale
    roots = np.roots(monic)
    deriv = np.polyder(monic)
    for _ in range(3):
        pv = np.polyval(monic, roots)
        dv = np.polyval(deriv, roots)
        safe = np.abs(dv) > 0.0
        step_ = np.zeros_like(roots)
        step_[safe] = pv[safe] / dv[safe]
        roots = roots - step_
    return roots


def pole_residual(coeffs, roots) -> float:
    """Largest |p(root)| relative to max|coeff| (certificate metric)."""
    coeffs = np.asarray(coeffs, dtype=float)
    if len(roots) == 0:
        return 0.0
    return float(np.max(np.abs(np.polyval(coeffs, roots))) / np.max(np.abs(coeffs)))


def max_real_pole(coeffs) -> float:
    """Max real part of the closed-loop poles, deflating one origin root.

    A simple root at the origin (zero constant coefficient) is the designed
    velocity-level integrator and does not count against stability.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs[-1] == 0.0:
        coeffs = coeffs[:-1]
    roots = poles(coeffs)
    if len(roots) == 0:
        return -math.inf
    return float(np.max(roots.real))


@dataclass
class StabilityGrid:
    """Max real pole part over a (k_h, d_h) parameter box."""

    kh_axis: np.ndarray
    dh_axis: np.ndarray
    max_real: np.ndarray  # shape (len(kh_axis), len(dh_axis))

    @property
    def stable(self) -> np.ndarray:
        return self.max_real < ORIGIN_POLE_EPS

    def instability_threshold(self) -> float | None:
        """Smallest k_h with any unstable grid point, or None if all stable."""
        unstable_rows = np.flatnonzero(~self.stable.all(axis=1))
        if len(unstable_rows) == 0:
            return None
        return float(self.kh_axis[unstable_rows[0]])

    def to_csv(self) -> str:
        lines = ["kh,dh,max_real,stable"]
        for i, kh in enumerate(self.kh_axis):
            for j, dh in enumerate(self.dh_axis):
                lines.append(
                    f"{kh!r},{dh!r},{self.max_real[i, j]!r},"
                    f"{int(self.stable[i, j])}"
                )
        return "\n".join(lines) + "\n"


def stability_map(robot: RobotParams, kh_range: tuple, dh_range: tuple,
                  grid_dims: tuple, m_h: float = 70.0, axis: str = "x") -> StabilityGrid:
    """Sweep human stiffness/damping and record the max real pole part."""
    (kh_lo, kh_hi), (dh_lo, dh_hi) = kh_range, dh_range
    n_kh, n_dh = grid_dims
    if n_kh < 2 or n_dh < 2:
        raise ValueError("grid_dims must be >= 2 per axis")
    if kh_lo < 0 or dh_lo < 0 or kh_hi <= kh_lo or dh_hi <= dh_lo:
        raise ValueError("ranges must be non-negative and increasing")
    kh_axis = np.linspace(kh_lo, kh_hi, n_kh)
    dh_axis = np.linspace(dh_lo, dh_hi, n_dh)
    grid = np.empty((n_kh, n_dh))
    for i, kh in enumerate(kh_axis):
        for j, dh in enumerate(dh_axis):
            human = HumanParams(m_h=m_h, k_h=float(kh), d_h=float(dh))
            grid[i, j] = max_real_pole(characteristic_polynomial(robot, human, axis))
    return StabilityGrid(kh_axis=kh_axis, dh_axis=dh_axis, max_real=grid)
