"""Command-line driver.

    atommux compile --mode pairwise --circuits ./workload --grid 8x8 \
        --wmax 8 --time-limit 10000 --out report.csv

Options may also come from a config file (``--config``, JSON or flat
TOML); explicit command-line flags win.  Exit status: 0 on full success,
2 when any task timed out or failed mid-run, 1 on configuration errors.
"""

from __future__ import annotations

import sys

import click

from .bench import ConfigError, ExperimentConfig, load_config_file, parse_grid, run

_MODES = ("pairwise", "grouped", "multi")


@click.group()
def main():
    """Multi-programming compiler toolkit for neutral-atom arrays."""


@main.command("compile")
@click.option("--mode", type=click.Choice(_MODES), default=None, help="Experiment mode.")
@click.option("--circuits", "circuits", type=click.Path(), default=None,
              help="Directory of .qasm/.json circuits (or a single file).")
@click.option("--arrays", type=int, default=None, help="Number of array resources.")
@click.option("--wmax", type=int, default=None, help="Spatial capacity per array.")
@click.option("--grid", "grid_spec", type=str, default=None,
              help="Interaction grid, XxY or XxY:RxC (R/C = AOD line counts).")
@click.option("--time-limit", type=float, default=None,
              help="Seconds allowed per compilation task.")
@click.option("--window", type=int, default=None, help="Solve-window stage count.")
@click.option("--strict-exclusivity", type=click.Choice(["on", "off"]), default=None,
              help="Extend committed gate-site exclusion to all new atoms.")
@click.option("--jobs", type=int, default=None, help="Concurrent array compilations.")
@click.option("--seed", type=int, default=None, help="Run seed recorded in the report.")
@click.option("--deterministic", is_flag=True, default=False,
              help="Zero out wall-clock fields so reports are byte-identical.")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="JSON/TOML config file with the same keys.")
@click.option("--out", type=click.Path(), default=None, help="Report CSV path.")
def compile_cmd(mode, circuits, arrays, wmax, grid_spec, time_limit, window,
                strict_exclusivity, jobs, seed, deterministic, config_path, out):
    """Run one experiment mode over a circuit workload and emit a CSV report."""
    try:
        merged: dict = {}
        if config_path:
            merged.update(load_config_file(config_path))
        cli_values = {
            "mode": mode,
            "circuits": circuits,
            "arrays": arrays,
            "wmax": wmax,
            "grid": grid_spec,
            "time_limit": time_limit,
            "window": window,
            "strict_exclusivity": strict_exclusivity,
            "jobs": jobs,
            "seed": seed,
            "out": out,
        }
        merged.update({k: v for k, v in cli_values.items() if v is not None})
        if deterministic:
            merged["deterministic"] = True
        cfg = _build_config(merged)
    except (ConfigError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)

    report = run(cfg)
    ok = sum(1 for r in report.rows if r.get("status") == "ok")
    click.echo(f"{report.mode}: {len(report.rows)} rows, {ok} ok, "
               f"{report.failures} failed/timed out"
               + (f", report written to {cfg.out}" if cfg.out else ""))
    sys.exit(report.exit_code)


def _build_config(values: dict) -> ExperimentConfig:
    if "mode" not in values:
        raise ConfigError("missing required option --mode")
    if "circuits" not in values:
        raise ConfigError("missing required option --circuits")
    strict = values.get("strict_exclusivity", "on")
    if isinstance(strict, str):
        strict = strict == "on"
    grid = values.get("grid", "8x8")
    if isinstance(grid, str):
        grid = parse_grid(grid)
    return ExperimentConfig(
        mode=values["mode"],
        circuits=values["circuits"],
        num_arrays=int(values.get("arrays", 1)),
        capacity=int(values.get("wmax", 8)),
        grid=grid,
        time_limit_seconds=float(values.get("time_limit", 10000.0)),
        window=int(values.get("window", 2)),
        strict_exclusivity=strict,
        jobs=int(values.get("jobs", 1)),
        seed=int(values.get("seed", 0)),
        out=values.get("out"),
        deterministic=bool(values.get("deterministic", False)),
    )


if __name__ == "__main__":
    main()
