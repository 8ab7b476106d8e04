"""Command-line interface.

    qoctrl run <config.yaml> [--workers N] [--out DIR]
    qoctrl baseline <scenario> --T 1 --T 5 ...
    qoctrl pulses show <path>
"""

from __future__ import annotations

import click

from . import runner, scenarios


@click.group()
def main():
    """Control-enhanced quantum parameter estimation toolkit."""


@main.command("run")
@click.argument("config_path", type=click.Path())
@click.option("--workers", type=int, default=None, help="Parallel sweep workers.")
@click.option("--out", "out_dir", type=click.Path(), default=None,
              help="Output directory override.")
def run_cmd(config_path, workers, out_dir):
    """Run the sweep described by a config file and write its CSV."""
    cfg = runner.parse_config(config_path)
    if workers is not None:
        cfg.workers = workers
    if out_dir is not None:
        cfg.output_dir = out_dir
    path = runner.run_experiment(cfg)
    click.echo(path)


@main.command("baseline")
@click.argument("scenario", type=click.Choice(scenarios.SCENARIO_NAMES))
@click.option("--T", "durations", type=float, multiple=True, required=True,
              help="Protocol duration(s); repeatable.")
@click.option("--dt", type=float, default=0.01, show_default=True)
def baseline_cmd(scenario, durations, dt):
    """Print uncontrolled QFI (simulated and analytic) at the given durations."""
    cfg = runner.resolve_config({"scenario": scenario, "sweep": "uncontrolled_baseline",
                                 "T": list(durations), "dt": dt})
    spec = scenarios.get_scenario(scenario)
    click.echo("T,qfi_simulated,qfi_analytic")
    for T in sorted(durations):
        grid = runner._grid_for(cfg, T)
        sim = runner.uncontrolled_qfi(spec, grid)
        ana = scenarios.analytic_uncontrolled_qfi(spec, T)
        click.echo("%.6g,%.6g,%s" % (T, sim, "" if ana is None else "%.6g" % ana))


@main.group("pulses")
def pulses_group():
    """Pulse table utilities."""


@pulses_group.command("show")
@click.argument("path", type=click.Path(exists=True))
def pulses_show(path):
    """Print a stored pulse table."""
    with open(path) as fh:
        click.echo(fh.read(), nl=False)


if __name__ == "__main__":
    main()
