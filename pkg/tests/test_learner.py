import numpy as np
import pytest

from dancetrainer.config import SessionConfig
from dancetrainer.dynamics import HumanParams, RobotParams
from dancetrainer.figures import Tempo, figure_by_kind
from dancetrainer.learner import (
    FrozenIntent,
    InternalModel,
    LearnerParams,
    intent_policy,
    simulate_error_sequence,
    update_internal_model,
)
from dancetrainer.session import run_session


def test_update_with_zero_gain_is_identity():
    fig = figure_by_kind("FWD")
    model = InternalModel()
    before = model.profile_for(fig).copy()
    desired = np.asarray(fig.velocities)
    update_internal_model(model, fig, desired, before, g=0.0)
    np.testing.assert_array_equal(model.profile_for(fig), before)


def test_unit_gain_with_faithful_execution_snaps_to_desired():
    fig = figure_by_kind("FWD")
    model = InternalModel()
    desired = np.asarray(fig.velocities)
    executed = model.profile_for(fig).copy()  # executed exactly the intent
    update_internal_model(model, fig, desired, executed, g=1.0)
    np.testing.assert_allclose(model.profile_for(fig), desired)


def test_partial_gain_decays_error_geometrically():
    fig = figure_by_kind("CCLF")
    g = 0.3
    model = InternalModel()
    desired = np.asarray(fig.velocities)
    err0 = np.abs(desired - model.profile_for(fig)).max()
    for n in range(1, 6):
        executed = model.profile_for(fig).copy()
        update_internal_model(model, fig, desired, executed, g)
        err = np.abs(desired - model.profile_for(fig)).max()
        assert err == pytest.approx((1 - g) ** n * err0, rel=1e-9)


def test_update_rejects_grid_mismatch():
    fig = figure_by_kind("FWD")
    model = InternalModel()
    with pytest.raises(ValueError):
        update_internal_model(model, fig, np.zeros((3, 7)), np.zeros((3, 7)), 0.5)


# -- dynamics-free error sequences ----------------------------------------------

def test_zero_gain_zero_noise_is_constant():
    traces = simulate_error_sequence(LearnerParams(g=0.0, baseline_error=5.0, noise_amp=0.0),
                                     practices=20, samples_per_practice=10)
    for tr in traces:
        np.testing.assert_array_equal(tr, np.full(10, 5.0))


def test_error_decay_reaches_expected_level():
    traces = simulate_error_sequence(LearnerParams(g=0.02, baseline_error=10.0, noise_amp=0.0),
                                     practices=101, samples_per_practice=1)
    assert traces[100][0] == pytest.approx(10.0 * 0.98**100, rel=1e-12)
    assert traces[100][0] == pytest.approx(1.33, abs=0.01)


def test_same_seed_reproduces_traces_exactly():
    params = LearnerParams(g=0.05, baseline_error=8.0, noise_amp=0.5, seed=42)
    a = simulate_error_sequence(params, 30, 25)
    b = simulate_error_sequence(params, 30, 25)
    for ta, tb in zip(a, b):
        np.testing.assert_array_equal(ta, tb)


def test_errors_never_negative_and_noise_bounded():
    params = LearnerParams(g=0.5, baseline_error=0.1, noise_amp=0.3, seed=3)
    traces = simulate_error_sequence(params, 50, 20)
    flat = np.concatenate(traces)
    assert flat.min() >= 0.0
    assert flat.max() <= 0.1 + 0.3 + 1e-12


def test_positive_gain_zero_noise_is_non_increasing_to_zero():
    traces = simulate_error_sequence(LearnerParams(g=0.1, baseline_error=6.0, noise_amp=0.0),
                                     practices=100, samples_per_practice=1)
    levels = [tr[0] for tr in traces]
    assert all(a >= b for a, b in zip(levels, levels[1:]))
    assert levels[-1] < 0.01 * levels[0]


def test_validation_rejects_negative_params():
    with pytest.raises(ValueError):
        LearnerParams(g=-0.1)
    with pytest.raises(ValueError):
        simulate_error_sequence(LearnerParams(), 0, 5)


# -- intent policies -----------------------------------------------------------------

def test_frozen_intent_zeroes_velocity_inside_window():
    inner = lambda t: np.full(7, 0.2)
    frozen = FrozenIntent(inner, (1.0, 2.0))
    np.testing.assert_array_equal(frozen(0.5), np.full(7, 0.2))
    np.testing.assert_array_equal(frozen(1.5), np.zeros(7))
    np.testing.assert_array_equal(frozen(2.0), np.full(7, 0.2))


def test_intent_policy_factory():
    assert intent_policy("compliant", desired_velocity_fn=lambda t: np.zeros(7))
    assert intent_policy("frozen", inner=lambda t: np.zeros(7), window=(0, 1))
    assert intent_policy("learner", params=LearnerParams())
    with pytest.raises(ValueError):
        intent_policy("psychic")


def test_compliant_session_tracks_desired_closely():
    # no guidance force, free-floating partner: feedforward keeps tracking tight
    cfg = SessionConfig(
        robot=RobotParams(f_d=((0.0, 0.0),) * 7),
        human=HumanParams(k_h=0.0, d_h=0.0),
        intent="compliant",
        figure_sequence=("FWD",),
        practices=2,
        mode="constant",
    )
    record = run_session(cfg)
    errors = np.array([row.error for row in record.samples]) / cfg.zones.error_scale
    vmax = 0.3
    rms = np.sqrt(np.mean(errors**2))
    assert rms < 0.02 * vmax


def test_learner_session_error_strictly_decreases_without_noise():
    cfg = SessionConfig(
        learner=LearnerParams(g=0.4, noise_amp=0.0, seed=1),
        figure_sequence=("FWD",),
        practices=10,
        mode="constant",
    )
    record = run_session(cfg)
    means = [row.mean_error for row in record.figures]
    assert all(a > b for a, b in zip(means, means[1:]))
    assert len(means) == 10
