import json
from pathlib import Path

import numpy as np
import pytest

from dancetrainer.experiments import (
    TRAJECTORY_HEADER,
    cps_curve_from_errors,
    fig5_baseline_levels,
    run_cohort,
    run_fig5,
    run_stability_map,
    run_stoptest,
    score_offline,
)
from dancetrainer.figures import Tempo, figure_by_kind, figure_duration, desired_velocity_series
from dancetrainer.scoring import ScoreParams, Zone, ZoneConfig, classify


def read_curve(path):
    rows = Path(path).read_text().strip().splitlines()[1:]
    return np.array([float(r.split(",")[2]) for r in rows])


def test_fig5_baseline_levels_span_the_ladder():
    levels = fig5_baseline_levels()
    cfg = ZoneConfig()
    zones = [classify(lv, 0, cfg) for lv in levels]
    assert zones[0] is Zone.GREY
    assert zones[1] is Zone.ORANGE
    assert zones[2] is Zone.YELLOW
    assert zones[3] is Zone.GREEN
    assert zones[4] is Zone.BLUE and zones[5] is Zone.BLUE
    assert all(a > b for a, b in zip(levels, levels[1:]))


def test_cps_curve_tracks_zone_arithmetic():
    score = ScoreParams()
    zones = ZoneConfig()
    # ten practices of exactly-zero error: 10 Blue samples each
    curve, state = cps_curve_from_errors([np.zeros(10)] * 3, score, zones)
    assert curve == pytest.approx([6.0, 12.0, 18.0])
    assert state.zone_counts[0] == 30


def test_fig5_outputs(tmp_path):
    files = run_fig5(tmp_path, practices=60)
    names = {f.name for f in files}
    assert {"fig5_sim1.csv", "fig5_sim6.csv", "manifest.json"} <= names
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["practices"] == 60
    assert len(manifest["baseline_levels"]) == 6
    # low-error baseline saturates high, high-error baseline sinks
    assert read_curve(tmp_path / "fig5_sim6.csv")[-1] == 50.0
    assert read_curve(tmp_path / "fig5_sim1.csv")[-1] == -50.0


def test_fig5_reruns_are_byte_identical(tmp_path):
    run_fig5(tmp_path / "a", practices=40)
    run_fig5(tmp_path / "b", practices=40)
    for f in sorted((tmp_path / "a").iterdir()):
        assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes(), f.name


def test_stoptest_writes_documented_csv(tmp_path):
    path = run_stoptest(tmp_path / "stop.csv", duration=4.0, freeze_window=(1.0, 2.0))
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "t,vxd,vx,fix,vyd,vy,fiy,vphid,vphi,fiphi"
    assert len(lines) > 100


def test_stability_map_csv_and_threshold(tmp_path):
    grid = run_stability_map(tmp_path / "map.csv", kh_range=(0.0, 500_000.0),
                             dh_range=(0.0, 1200.0), delay=0.01, grid_dims=(30, 5))
    lines = (tmp_path / "map.csv").read_text().strip().splitlines()
    assert lines[0] == "kh,dh,max_real,stable"
    assert len(lines) == 1 + 30 * 5
    assert grid.instability_threshold() is not None


def test_cohort_pairs_and_summary(tmp_path):
    results = run_cohort(n_learners=2, gains=[0.1, 0.2], out_dir=tmp_path)
    assert len(results) == 2
    for r in results:
        assert r.pt.config.learner.seed == r.constant.config.learner.seed
        assert r.pt.config.mode == "pt" and r.constant.config.mode == "constant"
    summary = (tmp_path / "summary.csv").read_text().strip().splitlines()
    assert len(summary) == 3  # header + one row per learner
    assert summary[0].startswith("learner,seed,gain,initial_skill")
    assert (tmp_path / "learner00_pt.csv").exists()
    assert (tmp_path / "learner01_constant.csv").exists()


def test_cohort_rejects_tiny_cohorts():
    with pytest.raises(ValueError):
        run_cohort(n_learners=1)


# -- offline scoring ------------------------------------------------------------------

def make_trace(kind="FWD", scale=1.0, n=101, truncate=None):
    fig = figure_by_kind(kind)
    duration = figure_duration(fig, Tempo())
    times = np.linspace(0.0, duration, n)
    vel = desired_velocity_series(fig, times, Tempo()) * scale
    if truncate:
        times, vel = times[:truncate], vel[:truncate]
    lines = [TRAJECTORY_HEADER]
    for t, row in zip(times, vel):
        lines.append(",".join(repr(float(v)) for v in (t, *row)))
    return "\n".join(lines) + "\n"


def test_offline_scoring_of_perfect_trace():
    report = score_offline(make_trace(), "FWD", practice_n=0)
    assert report.accuracy == 1.0
    assert report.bar_zone is Zone.BLUE
    assert report.mean_error == 0.0


def test_offline_scoring_of_motionless_trace():
    # oracle: classify the desired-speed samples directly with the zone table
    from dancetrainer.config import SESSION_ERROR_SCALE

    fig = figure_by_kind("FWD")
    duration = figure_duration(fig, Tempo())
    times = np.linspace(0.0, duration, 101)
    desired = desired_velocity_series(fig, times, Tempo())
    errors = SESSION_ERROR_SCALE * np.abs(desired[:, :3]).sum(axis=1) / 3.0
    mu = {Zone.BLUE: 3.0, Zone.GREEN: 2.0, Zone.YELLOW: 1.0, Zone.ORANGE: 0.5,
          Zone.GREY: 0.0}
    expected_acc = np.mean([mu[classify(e, 0, ZoneConfig())] for e in errors]) / 3.0
    report = score_offline(make_trace(scale=0.0), "FWD", practice_n=0)
    assert report.accuracy == pytest.approx(expected_acc, abs=1e-12)
    assert report.accuracy < 0.25  # large errors: most of the figure lands in Grey
    assert report.bar_zone is Zone.GREY


def test_offline_scoring_rejects_truncated_trace():
    with pytest.raises(ValueError, match="mismatch"):
        score_offline(make_trace(truncate=50), "FWD", practice_n=0)


def test_offline_scoring_rejects_malformed_rows():
    bad = TRAJECTORY_HEADER + "\n0.0,1,2\n"
    with pytest.raises(ValueError, match="columns"):
        score_offline(bad, "FWD", practice_n=0)


def test_offline_report_csv_shape():
    report = score_offline(make_trace(), "FWD", practice_n=3)
    lines = report.to_csv().strip().splitlines()
    assert lines[0] == "t,E,zone,cps"
    assert len(lines) == 102
