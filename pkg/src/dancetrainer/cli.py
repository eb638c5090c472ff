"""Command-line interface: offline simulations, preset experiments, offline
scoring, and the live training service."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .config import SessionConfig, config_to_json, load_config
from .experiments import run_cohort, run_fig5, run_stability_map, run_stoptest, score_offline
from .session import run_session


def _load_or_default(config_path) -> SessionConfig:
    if config_path is None:
        return SessionConfig()
    return load_config(config_path)


def _fail(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


@click.group()
@click.version_option(package_name="dancetrainer")
def main():
    """Robotic dance-training simulator and live service."""


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Session config JSON (defaults are built in).")
@click.option("--mode", type=click.Choice(["pt", "constant"]), default=None,
              help="Override the adaptation mode.")
@click.option("--practices", type=int, default=None, help="Override the figure count.")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
def simulate(config_path, mode, practices, out_dir):
    """Run one offline training session and persist its archive."""
    try:
        cfg = _load_or_default(config_path)
        if mode is not None:
            cfg = cfg.with_mode(mode)
        if practices is not None:
            from dataclasses import replace

            cfg = replace(cfg, practices=practices)
        record = run_session(cfg)
        record.write_dir(out_dir)
    except (ValueError, OSError) as exc:
        _fail(str(exc))
    click.echo(f"session written to {out_dir} "
               f"(final CPS {record.final_cps:.1f}, accuracy {record.final_accuracy:.3f})")


@main.command()
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
def fig5(out_dir):
    """CPS-vs-practice curves for zero-gain and learning students."""
    try:
        files = run_fig5(out_dir)
    except OSError as exc:
        _fail(str(exc))
    click.echo(f"wrote {len(files)} files to {out_dir}")


@main.command()
@click.option("--out", "out_file", type=click.Path(dir_okay=False), required=True)
def stoptest(out_file):
    """Force-limit stop test: partner freezes over [2 s, 6 s]."""
    try:
        run_stoptest(out_file)
    except (ValueError, OSError) as exc:
        _fail(str(exc))
    click.echo(f"stop-test trace written to {out_file}")


def _parse_range(spec: str):
    parts = spec.split(":")
    if len(parts) != 3:
        raise ValueError(f"range must be lo:hi:n, got {spec!r}")
    lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    return lo, hi, n


@main.command("stability-map")
@click.option("--kh", default="0:500000:100", show_default=True,
              help="Human stiffness sweep lo:hi:n (N/m).")
@click.option("--dh", default="0:1200:50", show_default=True,
              help="Human damping sweep lo:hi:n (N s/m).")
@click.option("--delay", type=float, default=0.0, show_default=True,
              help="Force-feedback loop delay in seconds.")
@click.option("--out", "out_file", type=click.Path(dir_okay=False), required=True)
def stability_map_cmd(kh, dh, delay, out_file):
    """Closed-loop pole map over a human stiffness/damping box."""
    try:
        kh_lo, kh_hi, kh_n = _parse_range(kh)
        dh_lo, dh_hi, dh_n = _parse_range(dh)
        grid = run_stability_map(out_file, (kh_lo, kh_hi), (dh_lo, dh_hi),
                                 delay=delay, grid_dims=(kh_n, dh_n))
    except (ValueError, OSError) as exc:
        _fail(str(exc))
    threshold = grid.instability_threshold()
    if threshold is None:
        click.echo(f"map written to {out_file}; all grid points stable")
    else:
        click.echo(f"map written to {out_file}; instability from K_h ≈ {threshold:.0f} N/m")


@main.command()
@click.option("--n", "n_learners", type=int, default=6, show_default=True)
@click.option("--gains", default=None,
              help="Comma-separated learning gains cycled over the cohort.")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
def cohort(n_learners, gains, out_dir):
    """Paired adaptive-vs-constant sessions over seeded learners."""
    try:
        gain_list = [float(g) for g in gains.split(",")] if gains else None
        results = run_cohort(n_learners=n_learners, gains=gain_list, out_dir=out_dir)
    except (ValueError, OSError) as exc:
        _fail(str(exc))
    ok = sum(1 for r in results if r.tv_pt >= r.tv_constant)
    click.echo(f"{len(results)} paired sessions written to {out_dir}; "
               f"adaptive-arm CPS variation >= constant in {ok}/{len(results)}")


@main.command()
@click.option("--trajectory", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--figure", "figure_kind", required=True,
              help="Figure kind the trace claims to perform (FWD, CCLF, ...).")
@click.option("--n", "practice_n", type=int, default=0, show_default=True,
              help="Practice count used for zone classification.")
@click.option("--out", "out_file", type=click.Path(dir_okay=False), default=None,
              help="Optional per-sample report CSV.")
def score(trajectory, figure_kind, practice_n, out_file):
    """Score a recorded velocity trace against a built-in figure."""
    try:
        report = score_offline(Path(trajectory).read_text(encoding="utf-8"),
                               figure_kind, practice_n)
        if out_file:
            Path(out_file).write_text(report.to_csv(), encoding="utf-8")
    except (ValueError, OSError, KeyError) as exc:
        _fail(str(exc))
    click.echo(f"figure {report.figure_kind} practice {report.practice_n}: "
               f"mean E {report.mean_error:.3f}, bar {report.bar_zone.color}, "
               f"final CPS {report.final_state.cps:.1f}, accuracy {report.accuracy:.3f}")


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None)
@click.option("--mode", type=click.Choice(["pt", "constant"]), default=None)
@click.option("--port", type=int, default=8752, show_default=True)
@click.option("--tick-hz", type=float, default=30.0, show_default=True,
              help="State broadcast rate (up to 60 Hz).")
def serve(config_path, mode, port, tick_hz):
    """Run the live websocket training service (one trainee at a time)."""
    try:
        from .service import serve_forever

        cfg = _load_or_default(config_path)
        if mode is not None:
            cfg = cfg.with_mode(mode)
        serve_forever(cfg, port=port, tick_hz=tick_hz)
    except (ValueError, OSError) as exc:
        _fail(str(exc))


@main.command("default-config")
def default_config():
    """Print the built-in session configuration as JSON."""
    click.echo(config_to_json(SessionConfig()), nl=False)


if __name__ == "__main__":
    main()
