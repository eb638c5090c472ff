"""Progressive scoring: weighted velocity error, practice-tightening zones,
cumulative performance score (CPS), face color, and final accuracy.

Zones are ordered Blue (best) through Grey (worst). Zone widths shrink
hyperbolically with the practice count of the figure kind under evaluation,
so a fixed error earns a worse zone as practice accumulates; each width
converges to exactly half its unpracticed value.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import IntEnum

import numpy as np

from .figures import N_AXES

ZONE_COUNT = 5


class Zone(IntEnum):
    """Score zones in order of increasing error."""

    BLUE = 1
    GREEN = 2
    YELLOW = 3
    ORANGE = 4
    GREY = 5

    @property
    def color(self) -> str:
        return self.name.lower()


@dataclass(frozen=True)
class ZoneConfig:
    """Zone-curve constants, error weights, and the scoring sample period.

    error_scale pre-multiplies the weighted error before classification; it
    exists because the zone constants imply error units larger than raw m/s.
    """

    c1: float = 7.0
    c2: float = 0.07
    c3: float = 14.0
    weights: tuple = (1 / 3, 1 / 3, 1 / 3, 0.0, 0.0, 0.0, 0.0)
    sample_period: float = 0.01
    error_scale: float = 1.0
    zone_count: int = ZONE_COUNT

    def __post_init__(self):
        if not (self.c1 > 0 and self.c2 > 0 and self.c3 > 0):
            raise ValueError("c1, c2, c3 must be positive")
        if len(self.weights) != N_AXES:
            raise ValueError(f"weights must have {N_AXES} components")
        if any(w < 0 or w > 1 for w in self.weights):
            raise ValueError("weights must lie in [0, 1]")
        if abs(sum(self.weights) - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {sum(self.weights)}")
        if self.sample_period <= 0:
            raise ValueError("sample_period must be positive")
        if self.error_scale <= 0:
            raise ValueError("error_scale must be positive")


@dataclass(frozen=True)
class ScoreParams:
    """CPS rate/clamp, per-zone point values, face thresholds, accuracy weights."""

    alpha_z: float = 0.4
    cps_m: float = 50.0
    zone_values: tuple = (1.5, 0.0, -1.0, -2.0, -2.5)
    face_thresholds: tuple = (-30.0, -10.0, 10.0, 30.0)
    mu: tuple = (3.0, 2.0, 1.0, 0.5, 0.0)

    def __post_init__(self):
        if self.alpha_z <= 0:
            raise ValueError("alpha_z must be positive")
        if self.cps_m <= 0:
            raise ValueError("cps_m must be positive")
        if len(self.zone_values) != ZONE_COUNT or len(self.mu) != ZONE_COUNT:
            raise ValueError("zone_values and mu need one entry per zone")
        if not all(a > b for a, b in zip(self.zone_values[:-1], self.zone_values[1:])):
            raise ValueError("zone_values must be strictly decreasing")
        if not all(a >= b for a, b in zip(self.mu[:-1], self.mu[1:])):
            raise ValueError("mu must be non-increasing")
        if list(self.face_thresholds) != sorted(self.face_thresholds):
            raise ValueError("face_thresholds must ascend")


@dataclass(frozen=True)
class CpsState:
    """Running cumulative-performance-score state.

    sum_cps accumulates the clamped CPS value after every sample; it feeds
    the learning-gain time average. zone_counts tallies samples per zone.
    """

    cps: float = 0.0
    n_s: int = 0
    sum_cps: float = 0.0
    zone_counts: tuple = (0, 0, 0, 0, 0)

    @property
    def n_total(self) -> int:
        return sum(self.zone_counts)


def axis_error(vd: float, v: float) -> float:
    """Magnitude of the velocity deviation on one axis: sqrt((vd - v)^2)."""
    return abs(vd - v)


def weighted_error(vd, v, cfg: ZoneConfig) -> float:
    """Weighted sum of per-axis velocity errors, scaled by cfg.error_scale."""
    vd = np.asarray(vd, dtype=float)
    v = np.asarray(v, dtype=float)
    w = np.asarray(cfg.weights, dtype=float)
    return cfg.error_scale * float(np.abs(vd - v) @ w)


def zone_width(x: int, n: float, cfg: ZoneConfig) -> float:
    """Width of zone x after n practices: c3 * (1/(c2*n + 1) + 1) / (x + c1)."""
    if not 1 <= x <= 4:
        raise ValueError(f"zone index x must be in 1..4, got {x}")
    if n < 0:
        raise ValueError("practice count must be >= 0")
    return cfg.c3 * (1.0 / (cfg.c2 * n + 1.0) + 1.0) / (x + cfg.c1)


def zone_boundaries(n: float, cfg: ZoneConfig) -> tuple:
    """Ascending error cut points between zones; Grey lies above the last."""
    widths = [zone_width(x, n, cfg) for x in (1, 2, 3, 4)]
    bounds = np.cumsum(widths)
    return tuple(float(b) for b in bounds)


def classify(error: float, n: float, cfg: ZoneConfig) -> Zone:
    """Zone for an error at a practice count; ties go to the better zone."""
    if error < 0:
        raise ValueError("error must be non-negative")
    for zone, bound in zip((Zone.BLUE, Zone.GREEN, Zone.YELLOW, Zone.ORANGE),
                           zone_boundaries(n, cfg)):
        if error <= bound:
            return zone
    return Zone.GREY


def zone_value(zone: Zone, params: ScoreParams) -> float:
    """Per-sample CPS points for a zone (Table of zone settings)."""
    return params.zone_values[int(zone) - 1]


def cps_update(state: CpsState, zone: Zone, params: ScoreParams) -> CpsState:
    """Accumulate one scored sample into the CPS state (clamped to ±cps_m)."""
    raw = state.cps + params.alpha_z * zone_value(zone, params)
    clamped = min(max(raw, -params.cps_m), params.cps_m)
    counts = list(state.zone_counts)
    counts[int(zone) - 1] += 1
    return replace(
        state,
        cps=clamped,
        n_s=state.n_s + 1,
        sum_cps=state.sum_cps + clamped,
        zone_counts=tuple(counts),
    )


def face_color(cps: float, params: ScoreParams) -> Zone:
    """Face feedback color for a CPS value on the same 5-color scale.

    Blue above the top threshold, Grey below the bottom one; the central
    band is closed on both sides so a fresh CPS of 0 reads Yellow.
    """
    t1, t2, t3, t4 = params.face_thresholds
    if cps > t4:
        return Zone.BLUE
    if cps > t3:
        return Zone.GREEN
    if cps >= t2:
        return Zone.YELLOW
    if cps >= t1:
        return Zone.ORANGE
    return Zone.GREY


def accuracy(state: CpsState, params: ScoreParams) -> float:
    """Final accuracy: zone-weighted sample average normalized by the top weight."""
    n_total = state.n_total
    if n_total == 0:
        raise ValueError("accuracy undefined with no scored samples")
    mu_h = params.mu[0]
    total = sum(m * n for m, n in zip(params.mu, state.zone_counts))
    return total / (n_total * mu_h)


def figure_score(samples, n: float, cfg: ZoneConfig) -> tuple[float, Zone]:
    """Mean error over one figure and its zone (the on-line performance bar)."""
    samples = list(samples)
    if not samples:
        raise ValueError("figure_score needs at least one error sample")
    mean_e = float(np.mean(samples))
    return mean_e, classify(mean_e, n, cfg)
