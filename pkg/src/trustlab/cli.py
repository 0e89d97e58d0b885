"""Operator command line: run the service, simulate experiments, analyze
exported datasets, and hit a running server's admin endpoints."""

from __future__ import annotations

import json
from pathlib import Path

import click
import httpx

from .analysis import analyze
from .session import ExperimentService, ServiceConfig
from .simulate import PlantedEffects, PopulationSpec, load_effects_config, run_experiment
from .strategy import load_strategy_config


@click.group()
def main():
    """Trust-game experiment platform."""


@main.command()
@click.option("--config", "strategy_config", type=click.Path(exists=True),
              help="Strategy table config file (YAML).")
@click.option("--slot-times", default=None,
              help="Comma-separated session start times, e.g. '10:00,12:00'.")
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--event-log", type=click.Path(), default=None,
              help="Append-only event log file for this session.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve(strategy_config, slot_times, seed, event_log, host, port):
    """Run the session service."""
    import uvicorn

    from .service import create_app

    kwargs = {"seed": seed}
    if slot_times:
        kwargs["slot_times"] = tuple(s.strip() for s in slot_times.split(","))
    tables = load_strategy_config(strategy_config) if strategy_config else None
    service = ExperimentService(ServiceConfig(**kwargs), tables=tables, event_sink=event_log)
    uvicorn.run(create_app(service), host=host, port=port)


@main.command()
@click.option("--n", required=True, type=int, help="Number of synthetic subjects.")
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--effects", "effects_path", type=click.Path(exists=True),
              help="YAML file with planted effects and population distributions.")
@click.option("--out", "out_dir", required=True, type=click.Path())
def simulate(n, seed, effects_path, out_dir):
    """Simulate a whole experiment and write dataset, events, and report."""
    if effects_path:
        effects, population = load_effects_config(effects_path)
    else:
        effects, population = PlantedEffects(), PopulationSpec()
    _, report = run_experiment(n, effects, population, seed=seed, out_dir=out_dir)
    click.echo(json.dumps(report.to_dict(), indent=2))


@main.command("analyze")
@click.option("--data", "data_dir", required=True, type=click.Path(exists=True))
@click.option("--report", "report_path", type=click.Path(), default=None)
def analyze_cmd(data_dir, report_path):
    """Run the regression battery over an exported dataset."""
    reports = analyze(data_dir, report_path)
    for key in ("trust", "discount", "certainty"):
        click.echo(reports[key].text())
        click.echo()
    if report_path:
        click.echo(f"report written to {report_path}")


@main.command()
@click.option("--url", default="http://127.0.0.1:8000", show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path())
def export(url, out_dir):
    """Ask a running server to export its dataset."""
    response = httpx.post(f"{url}/admin/export", json={"out_dir": str(Path(out_dir))})
    response.raise_for_status()
    click.echo(json.dumps(response.json(), indent=2))


@main.command()
@click.option("--url", default="http://127.0.0.1:8000", show_default=True)
def lottery(url):
    """Draw the payoff-weighted lottery on a running server."""
    response = httpx.post(f"{url}/admin/lottery")
    response.raise_for_status()
    click.echo(json.dumps(response.json(), indent=2))


if __name__ == "__main__":
    main()
