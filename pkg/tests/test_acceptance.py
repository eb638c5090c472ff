"""Acceptance suite: one test per release criterion, each printing a
PASS line with its measured values when it holds.

Criteria marked "qualitative" assert reproducible shape properties rather
than exact published curves (those depend on unpublished constants).
"""

import time

import numpy as np
import pytest

from dancetrainer.config import SessionConfig
from dancetrainer.dynamics import (
    HumanParams,
    RobotParams,
    characteristic_polynomial,
    max_real_pole,
    pole_residual,
    poles,
    stability_map,
    stop_test,
)
from dancetrainer.experiments import (
    STOP_TEST_HUMAN,
    STOP_TEST_WINDOW,
    fig5_baseline_levels,
    run_cohort,
    run_fig5,
)
from dancetrainer.figures import Tempo, figure_by_kind
from dancetrainer.learner import LearnerParams, simulate_error_sequence
from dancetrainer.scoring import (
    CpsState,
    ScoreParams,
    Zone,
    ZoneConfig,
    accuracy,
    classify,
    cps_update,
    zone_width,
)
from dancetrainer.session import run_session
from dancetrainer.teaching import PtParams, adapt_damping, adapt_force_gain

ZONES = ZoneConfig()  # c1=7, c2=0.07, c3=14
SCORE = ScoreParams()  # alpha_z=0.4, cps_m=50


def report(name, detail):
    print(f"ACCEPTANCE PASS: {name} -- {detail}")


def timed(budget_s):
    start = time.perf_counter()

    def check(name):
        elapsed = time.perf_counter() - start
        assert elapsed < budget_s, f"{name} took {elapsed:.1f}s (budget {budget_s}s)"
        return elapsed

    return check


def test_zone_table_fidelity():
    check = timed(1.0)
    expected_fresh = (3.5, 28.0 / 9.0, 2.8, 28.0 / 11.0)
    for x, want in zip((1, 2, 3, 4), expected_fresh):
        got = zone_width(x, 0, ZONES)
        assert abs(got - want) < 1e-9, (x, got, want)
        limit = zone_width(x, 1e18, ZONES)
        assert abs(limit - want / 2.0) < 1e-9, (x, limit)
    elapsed = check("zone table")
    report("zone table fidelity",
           f"widths {expected_fresh} at n=0, halved in the limit, {elapsed*1e3:.0f} ms")


def test_tightening_behavior():
    check = timed(1.0)
    assert classify(3.0, 0, ZONES) is Zone.BLUE
    assert classify(3.0, 100, ZONES) is Zone.GREEN
    check("tightening")
    report("tightening behavior", "E=3.0: Blue at n=0, Green at n=100")


def test_cps_mechanics():
    check = timed(5.0)
    state = CpsState()
    for k in range(84):
        state = cps_update(state, Zone.BLUE, SCORE)
        if k < 83:
            assert state.cps < 50.0
    assert state.cps == 50.0

    rng = np.random.default_rng(2024)
    stream = rng.integers(1, 6, size=100_000)
    state = CpsState()
    for z in stream:
        state = cps_update(state, Zone(int(z)), SCORE)
        assert -50.0 <= state.cps <= 50.0
    elapsed = check("cps mechanics")
    report("CPS mechanics",
           f"84 Blue samples clamp at +50; |cps|<=50 over 1e5 random samples, {elapsed:.1f} s")


def test_fig5_qualitative_reproduction(tmp_path):
    check = timed(10.0)
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    run_fig5(out_a)
    run_fig5(out_b)

    def curve(root, name):
        rows = (root / name).read_text().strip().splitlines()[1:]
        return np.array([float(r.split(",")[2]) for r in rows])

    mid = curve(out_a, "fig5_sim4.csv")  # mid-ladder zero-gain baseline
    peak_idx = int(np.argmax(mid))
    assert peak_idx < len(mid) - 1
    assert mid[-1] < mid.max() - 10.0, "zero-gain decline under tightening"

    finals = []
    for gain in (0.01, 0.02):
        learner_curve = curve(out_a, f"fig5_learner_g{gain}.csv")
        assert learner_curve[-1] > mid[-1], "learning run must finish higher"
        dip = learner_curve.min()
        assert learner_curve[-1] > dip + 10.0, "recovery after the decline"
        finals.append(learner_curve[-1])

    for name in ("fig5_sim1.csv", "fig5_sim4.csv", "fig5_learner_g0.01.csv"):
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()
    elapsed = check("fig5")
    report("learning-curve CPS arcs",
           f"zero-gain peak@{peak_idx} declines {mid.max()-mid[-1]:.0f} pts; "
           f"learning runs finish at {finals}; reruns byte-identical; {elapsed:.1f} s")


def test_stop_test_criteria():
    check = timed(5.0)
    trace = stop_test(RobotParams(), STOP_TEST_HUMAN, figure_by_kind("FWD"),
                      Tempo(), STOP_TEST_WINDOW, duration=10.0)
    t0, t1 = STOP_TEST_WINDOW
    vmax = np.abs(trace.xdot_d[:, 0]).max()

    settled_window = (trace.t > t0 + 2.0) & (trace.t <= t1)
    creep = np.abs(trace.xdot_c[settled_window, 0]).max()
    assert creep < 0.05 * vmax, f"stop creep {creep:.4f} vs {0.05 * vmax:.4f}"

    plateau = settled_window & (trace.xdot_d[:, 0] == vmax) \
        & (np.abs(trace.xdot_c[:, 0]) < 5e-5)
    assert plateau.sum() > 10
    predicted = 1.0 * 32.0 + 130.0 * trace.xdot_d[plateau, 0]
    rel = np.abs(trace.f_i[plateau, 0] - predicted) / np.abs(predicted)
    assert rel.max() < 0.02, f"steady force off by {rel.max():.3%}"

    recon = trace.t > t1 + 2.0
    err = np.abs(trace.xdot_c[recon, 0] - trace.xdot_d[recon, 0]).max()
    assert err < 0.05 * vmax, f"post-freeze tracking error {err:.4f}"
    elapsed = check("stop test")
    report("stop test",
           f"stopped to {creep/vmax:.1%} of cruise within 2 s; steady force within "
           f"{rel.max():.2%}; re-converged to {err/vmax:.1%}; {elapsed:.1f} s")


def test_adaptive_gain_endpoints():
    pt = PtParams()  # alpha_d=4, alpha_f=50, kd 80..130 for x/y
    kd0 = adapt_damping(0.0, pt)
    kd1 = adapt_damping(1.0, pt)
    kf0 = adapt_force_gain(0.0, pt)
    kf1 = adapt_force_gain(1.0, pt)
    assert kd0[0] == 130.0 and kd0[1] == 130.0
    assert kd1[0] == 117.5 and kd1[1] == 117.5
    assert kf0[0] == 1.0
    assert kf1[0] == 0.98
    report("adaptive-gain endpoints",
           "gamma 0 -> (130, 1.0); gamma 1 -> (117.5, 0.98), exact")


def test_stability_study(tmp_path):
    check = timed(30.0)
    box = dict(kh_range=(0.0, 500_000.0), dh_range=(0.0, 1200.0), grid_dims=(100, 50))

    delay_free = stability_map(RobotParams(), **box)
    assert delay_free.stable.all(), "no instability without delay or lag"

    delayed = stability_map(RobotParams(loop_delay=0.01), **box)
    threshold = delayed.instability_threshold()
    assert threshold is not None and 0.0 < threshold <= 500_000.0
    assert delayed.stable[0].all(), "K_h = 0 row must stay stable"

    halved = stability_map(RobotParams(loop_delay=0.005), **box)
    threshold_half = halved.instability_threshold()
    assert threshold_half is not None and threshold_half > threshold

    rng = np.random.default_rng(7)
    worst = 0.0
    for kh in rng.uniform(0, 500_000.0, size=40):
        for robot in (RobotParams(loop_delay=0.01), RobotParams()):
            coeffs = characteristic_polynomial(
                robot, HumanParams(m_h=70.0, k_h=float(kh), d_h=600.0), "x")
            worst = max(worst, pole_residual(coeffs, poles(coeffs)))
    assert worst <= 1e-8, f"pole residual certificate violated: {worst:.2e}"
    elapsed = check("stability study")
    report("stability study",
           f"delay-free box stable; 10 ms delay unstable from K_h≈{threshold:.0f} N/m, "
           f"5 ms from K_h≈{threshold_half:.0f}; residuals <= {worst:.1e}; {elapsed:.1f} s")


def test_accuracy_endpoints():
    def tally(zones):
        state = CpsState()
        for z in zones:
            state = cps_update(state, z, SCORE)
        return accuracy(state, SCORE)

    assert tally([Zone.BLUE] * 9) == 1.0
    assert tally([Zone.GREY] * 9) == 0.0
    mixed = tally([Zone.BLUE] * 5 + [Zone.GREEN] * 5)
    assert abs(mixed - 25.0 / 30.0) < 1e-9
    report("accuracy endpoints", f"all-Blue 1.0, all-Grey 0.0, 5B+5G {mixed:.6f}")


def test_cohort_contrast(tmp_path):
    check = timed(60.0)
    results = run_cohort(n_learners=6, out_dir=tmp_path / "cohort")
    assert len(results) == 6
    for res in results:
        assert res.tv_pt >= res.tv_constant, (
            f"learner {res.learner}: adaptive-arm variation {res.tv_pt:.1f} "
            f"< constant {res.tv_constant:.1f}"
        )
    again = run_cohort(n_learners=6)
    for a, b in zip(results, again):
        assert a.tv_pt == b.tv_pt and a.tv_constant == b.tv_constant
    elapsed = check("cohort")
    margins = [round(r.tv_pt - r.tv_constant, 2) for r in results]
    report("cohort contrast",
           f"adaptive-arm CPS variation >= constant for 6/6 learners "
           f"(margins {margins}); deterministic; {elapsed:.1f} s")


def test_replay_determinism(tmp_path):
    from click.testing import CliRunner

    from dancetrainer.cli import main
    from dancetrainer.config import save_config

    cfg = SessionConfig(figure_sequence=("FWD", "CCLF"), practices=3,
                        dt=0.005, scoring_hz=50.0,
                        learner=LearnerParams(g=0.1, noise_amp=0.05, seed=3))
    cfg_path = tmp_path / "cfg.json"
    save_config(cfg, cfg_path)
    runner = CliRunner()
    for run_dir in ("r1", "r2"):
        result = runner.invoke(main, ["simulate", "--config", str(cfg_path),
                                      "--out", str(tmp_path / run_dir)])
        assert result.exit_code == 0, result.output
    names = ("config.json", "samples.csv", "figures.csv", "pt_trace.csv", "summary.json")
    for name in names:
        a = (tmp_path / "r1" / name).read_bytes()
        b = (tmp_path / "r2" / name).read_bytes()
        assert a == b, f"{name} differs between identical runs"
    report("replay determinism", f"{len(names)} output files byte-identical across reruns")
