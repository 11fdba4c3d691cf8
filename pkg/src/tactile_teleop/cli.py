"""Command line entry points: serve, simulate, replay, calibrate-demo."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .config import SessionConfig, load_config
from .session import (ReplayError, ScriptedOperator, Session, record_log,
                      replay_log, run_session, telemetry_hash)


def _load(config_path, **overrides) -> SessionConfig:
    config = load_config(config_path) if config_path else SessionConfig()
    overrides = {k: v for k, v in overrides.items() if v is not None}
    return config.replace(**overrides) if overrides else config


@click.group()
def main():
    """Tactile teleoperation service over a simulated gripper."""


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@click.option("--seed", type=int, default=None)
def serve(config_path, host, port, seed):
    """Run the live session service."""
    import uvicorn

    from .service import create_app
    app = create_app(_load(config_path, seed=seed))
    uvicorn.run(app, host=host, port=port)


@main.command()
@click.option("--script", "script_path", type=click.Path(exists=True), required=True)
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--ticks", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--object", "object_name", default=None)
@click.option("--pa/--no-pa", "partial_autonomy", default=None)
@click.option("--metrics-out", type=click.Path())
@click.option("--log-out", type=click.Path())
def simulate(script_path, config_path, ticks, seed, object_name,
             partial_autonomy, metrics_out, log_out):
    """Run a scripted operator session and report its metrics."""
    config = _load(config_path, seed=seed, object=object_name,
                   partial_autonomy=partial_autonomy)
    operator = ScriptedOperator.from_file(script_path)
    if log_out:
        records, metrics = record_log(log_out, config, operator, ticks)
    else:
        records, metrics = run_session(config, operator, ticks)
    payload = metrics.to_dict()
    payload["telemetry_hash"] = telemetry_hash(records)
    if metrics_out:
        Path(metrics_out).write_text(json.dumps(payload, indent=2) + "\n")
    click.echo(json.dumps(payload, indent=2))


@main.command()
@click.option("--log", "log_path", type=click.Path(exists=True), required=True)
@click.option("--metrics-out", type=click.Path())
def replay(log_path, metrics_out):
    """Re-run a recorded session and verify telemetry fidelity."""
    try:
        records, metrics, faithful = replay_log(log_path)
    except ReplayError as exc:
        raise click.ClickException(str(exc))
    payload = metrics.to_dict()
    payload["telemetry_hash"] = telemetry_hash(records)
    payload["faithful"] = faithful
    if metrics_out:
        Path(metrics_out).write_text(json.dumps(payload, indent=2) + "\n")
    click.echo(json.dumps(payload, indent=2))
    if not faithful:
        click.echo("replay diverged from the recorded telemetry", err=True)
        sys.exit(1)


@main.command("calibrate-demo")
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--seed", type=int, default=None)
def calibrate_demo(config_path, seed):
    """Run a quiescent session through calibration and print the thresholds."""
    config = _load(config_path, seed=seed)
    session = Session(config)
    operator = ScriptedOperator([{"from": 0, "to": 0, "b": True}])
    for k in range(config.calibration_frames + 5):
        session.tick(operator(k))
    out = {"calibrated": session.calibrated}
    for s in (1, 2):
        cal = session.haptics.calibrations[s]
        out[f"sensor_{s}"] = {
            "noise_threshold": cal.noise_threshold,
            "reference_mean": float(cal.reference.mean()),
        }
    out["post_calibration_ratio"] = session.records[-1].feedback.ratio_mean
    click.echo(json.dumps(out, indent=2))
