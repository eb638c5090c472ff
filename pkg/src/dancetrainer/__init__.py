"""Robotic dance training toolkit: coupled interaction simulation,
progressive scoring, adaptive guidance, session harness, and live service."""

__version__ = "0.1.0"

from .config import SessionConfig, load_config, save_config
from .dynamics import (
    CoupledSimulation,
    CoupledState,
    HumanParams,
    RobotParams,
    characteristic_polynomial,
    control_accel,
    human_force,
    poles,
    stability_map,
    step,
    stop_test,
)
from .figures import (
    DanceFigure,
    StudentScaling,
    Tempo,
    builtin_figures,
    desired_velocity,
    figure_duration,
    load_figure,
)
from .learner import InternalModel, LearnerParams, intent_policy, simulate_error_sequence, update_internal_model
from .scoring import (
    CpsState,
    ScoreParams,
    Zone,
    ZoneConfig,
    accuracy,
    classify,
    cps_update,
    face_color,
    figure_score,
    weighted_error,
    zone_boundaries,
    zone_width,
)
from .session import SessionEngine, SessionRecord, run_session
from .teaching import (
    FeedbackEvent,
    PtParams,
    PtState,
    adapt_damping,
    adapt_force_gain,
    learning_gain,
    pt_tick,
    reset_for_student,
)
