"""Session configuration: one nested, versioned document tying together the
robot, the partner model, the learner, scoring, and the teaching loop.

The JSON schema mirrors the dataclass tree one-to-one; `schema_version`
guards against silent drift. Loading an unknown key fails loudly rather than
ignoring a typo.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field, fields, replace

from .dynamics import HumanParams, RobotParams
from .figures import FIGURE_KINDS, StudentScaling, Tempo
from .learner import LearnerParams
from .scoring import ScoreParams, ZoneConfig
from .teaching import PtParams

SCHEMA_VERSION = 1

MODES = ("pt", "constant")
INTENTS = ("learner", "compliant")

# Coupled-session calibration: velocity errors (m/s, rad/s) are small against
# the zone-curve units, so sessions pre-scale the weighted error to make the
# zone ladder meaningful: a fresh novice lands in Grey, a fully converged
# learner hovers at the tightened Blue boundary (the intended "challenged"
# operating point). Module-level scoring keeps error_scale = 1.
SESSION_ERROR_SCALE = 280.0

# Simulated partner for offline sessions: firm coupling so the learner's own
# intent visibly shapes the couple. The interactive service default is softer.
SESSION_HUMAN = HumanParams(m_h=70.0, k_h=2000.0, d_h=800.0)


@dataclass(frozen=True)
class SessionConfig:
    """Everything needed to reproduce one training session bit-for-bit."""

    robot: RobotParams = field(default_factory=RobotParams)
    human: HumanParams = field(default_factory=lambda: SESSION_HUMAN)
    learner: LearnerParams = field(default_factory=LearnerParams)
    zones: ZoneConfig = field(default_factory=lambda: ZoneConfig(error_scale=SESSION_ERROR_SCALE))
    score: ScoreParams = field(default_factory=ScoreParams)
    pt: PtParams = field(default_factory=PtParams)
    tempo: Tempo = field(default_factory=Tempo)
    scaling: StudentScaling = field(default_factory=StudentScaling)
    figure_sequence: tuple = ("CCLF", "CCRF", "CCLB", "CCRB")
    practices: int = 20
    mode: str = "pt"
    intent: str = "learner"
    dt: float = 0.001
    scoring_hz: float = 100.0

    def __post_init__(self):
        if self.practices < 1:
            raise ValueError("practices must be >= 1")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.scoring_hz <= 0 or self.scoring_hz > 1.0 / self.dt:
            raise ValueError("scoring_hz must satisfy 0 < scoring_hz <= 1/dt")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.intent not in INTENTS:
            raise ValueError(f"intent must be one of {INTENTS}, got {self.intent!r}")
        if not self.figure_sequence:
            raise ValueError("figure_sequence must not be empty")
        unknown = [k for k in self.figure_sequence if k not in FIGURE_KINDS]
        if unknown:
            raise ValueError(f"unknown figure kinds in sequence: {unknown}")

    def with_mode(self, mode: str) -> "SessionConfig":
        return replace(self, mode=mode)


def _to_jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: _to_jsonable(getattr(obj, f.name)) for f in fields(obj)}
    if isinstance(obj, (list, tuple)):
        return [_to_jsonable(v) for v in obj]
    return obj


def config_to_dict(cfg: SessionConfig) -> dict:
    doc = {"schema_version": SCHEMA_VERSION}
    doc.update(_to_jsonable(cfg))
    return doc


def config_to_json(cfg: SessionConfig) -> str:
    return json.dumps(config_to_dict(cfg), indent=2, sort_keys=True) + "\n"


def _tupled(value):
    if isinstance(value, list):
        return tuple(_tupled(v) for v in value)
    return value


def _build(cls, data: dict, nested: dict):
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown {cls.__name__} keys: {sorted(unknown)}")
    kwargs = {}
    for key, value in data.items():
        if key in nested:
            kwargs[key] = _build(nested[key][0], value, nested[key][1])
        else:
            kwargs[key] = _tupled(value)
    return cls(**kwargs)


_NESTED = {
    "robot": (RobotParams, {}),
    "human": (HumanParams, {}),
    "learner": (LearnerParams, {}),
    "zones": (ZoneConfig, {}),
    "score": (ScoreParams, {}),
    "pt": (PtParams, {}),
    "tempo": (Tempo, {}),
    "scaling": (StudentScaling, {}),
}


def config_from_dict(doc: dict) -> SessionConfig:
    doc = dict(doc)
    version = doc.pop("schema_version", None)
    if version != SCHEMA_VERSION:
        raise ValueError(
            f"unsupported config schema_version {version!r}; expected {SCHEMA_VERSION}"
        )
    return _build(SessionConfig, doc, _NESTED)


def config_from_json(text: str) -> SessionConfig:
    return config_from_dict(json.loads(text))


def load_config(path) -> SessionConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return config_from_json(fh.read())


def save_config(cfg: SessionConfig, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(config_to_json(cfg))
