"""Command line driver.

Every subcommand resolves a full run configuration from three layers
(defaults, then an optional ``--config`` file of ``key=value`` lines,
then flags), seeds all randomness from the single ``--seed`` value, and
writes its artifacts plus a ``report.json`` into ``--out``.

Exit codes: 0 when every invariant check passed, 1 when a pipeline
invariant failed (the report still lands on disk), 2 on usage errors.
"""

from __future__ import annotations

import sys

import click

from .config import ENSEMBLE_KINDS, build_config, parse_config_file
from .curves import CURVE_KINDS, SYMMETRIES
from .measures import MEASURE_KINDS
from .pipeline import PipelineError, run_pipeline, run_stage


def _global_options(cmd):
    cmd = click.option("--seed", type=int, default=None,
                       help="Master seed feeding every stage stream.")(cmd)
    cmd = click.option("--out", type=click.Path(file_okay=False), default=None,
                       help="Directory for artifacts and report.json.")(cmd)
    cmd = click.option("--config", "config_path",
                       type=click.Path(exists=True, dir_okay=False),
                       default=None, help="key=value configuration file.")(cmd)
    cmd = click.option("--tol", type=float, default=None,
                       help="Residual tolerance for the embedding solve.")(cmd)
    cmd = click.option("--threads", type=int, default=None,
                       help="Independent streams for Monte Carlo stages.")(cmd)
    return cmd


def _model_options(cmd):
    cmd = click.option("--measure", type=click.Choice(sorted(MEASURE_KINDS)),
                       default=None, help="Mass assignment on the grid.")(cmd)
    cmd = click.option("--depth", type=int, default=None,
                       help="Grid depth; the side is 2**depth.")(cmd)
    cmd = click.option("--sigma", type=float, default=None,
                       help="Per-level log-weight spread of the cascade.")(cmd)
    cmd = click.option("--gamma", type=float, default=None,
                       help="Exponential-field strength parameter.")(cmd)
    cmd = click.option("--curve", type=click.Choice(sorted(CURVE_KINDS)),
                       default=None, help="First visit order.")(cmd)
    cmd = click.option("--curve2", type=click.Choice(sorted(CURVE_KINDS)),
                       default=None, help="Second visit order.")(cmd)
    cmd = click.option("--symmetry", type=click.Choice(sorted(SYMMETRIES)),
                       default=None, help="Square symmetry applied first.")(cmd)
    cmd = click.option("--symmetry2", type=click.Choice(sorted(SYMMETRIES)),
                       default=None, help="Square symmetry applied second.")(cmd)
    cmd = click.option("--resolution", type=int, default=None,
                       help="Permuton grid resolution (default 4**depth).")(cmd)
    return cmd


def _run(config_path, overrides, *, pipeline=None, stage=None) -> None:
    values = {k: v for k, v in overrides.items() if v is not None}
    if pipeline is not None:
        values["pipeline"] = pipeline
    try:
        file_values = parse_config_file(config_path) if config_path else None
        config = build_config(file_values, values)
    except (ValueError, OSError) as exc:
        click.echo(f"usage error: {exc}", err=True)
        sys.exit(2)
    try:
        if stage is not None:
            report = run_stage(config, stage)
        else:
            report = run_pipeline(config)
    except PipelineError as exc:
        click.echo(f"FAIL [{exc.stage}] {exc.invariant}", err=True)
        click.echo(f"report: {config.out_dir() / 'report.json'}", err=True)
        sys.exit(1)
    except ValueError as exc:
        click.echo(f"FAIL {exc}", err=True)
        sys.exit(1)
    for entry in report["checks"]:
        mark = "pass" if entry["passed"] else "FAIL"
        click.echo(f"{mark} [{entry['stage']}] {entry['check']}")
    click.echo(f"report: {config.out_dir() / 'report.json'}")


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def main():
    """Permuton pipelines on grid curves: build, reconstruct, embed, verify."""


@main.command()
@_global_options
@_model_options
def measure(config_path, **overrides):
    """Build the grid measure and write it with its heatmap."""
    _run(config_path, overrides, stage="measure")


@main.command()
@_global_options
@_model_options
def curves(config_path, **overrides):
    """Build the curve pair, run it through the measure clock."""
    _run(config_path, overrides, stage="curves")


@main.command()
@_global_options
@click.option("--n", type=int, default=None, help="Number of walk steps.")
@click.option("--rho", type=float, default=None,
              help="Increment correlation; derived from gamma when unset.")
@click.option("--gamma", type=float, default=None,
              help="Sets rho through the coupling rule when rho is unset.")
def walks(config_path, **overrides):
    """Sample a correlated walk pair and its mated cell graph."""
    _run(config_path, overrides, stage="walks")


@main.command()
@_global_options
@_model_options
def permuton(config_path, **overrides):
    """Rasterize the coupling of the two curve clocks."""
    _run(config_path, overrides, pipeline="permuton")


@main.command()
@_global_options
@_model_options
def augment(config_path, **overrides):
    """Saturate the permuton support under the product rule."""
    _run(config_path, overrides, stage="augment")


@main.command()
@_global_options
@_model_options
def tm(config_path, **overrides):
    """Derive the rank contact relation, from the support and the grid."""
    _run(config_path, overrides, stage="tm")


@main.command()
@_global_options
@_model_options
def graph(config_path, **overrides):
    """Rebuild the coarse cell graph from a refined contact relation."""
    _run(config_path, overrides, stage="graph")


@main.command()
@_global_options
@_model_options
def geometry(config_path, **overrides):
    """Cut times, boundary arcs, and the closed boundary walk."""
    _run(config_path, overrides, stage="geometry")


@main.command()
@_global_options
@_model_options
def embed(config_path, **overrides):
    """Harmonic embedding of the cell graph with the boundary on a circle."""
    _run(config_path, overrides, pipeline="embed")


@main.command()
@_global_options
@_model_options
def recover(config_path, **overrides):
    """Full chain: measure, curves, permuton, contact relation, embedding, field."""
    _run(config_path, overrides, pipeline="recover")


@main.command(hidden=True)
@_global_options
@_model_options
def reconstruct(config_path, **overrides):
    """Alias of recover."""
    _run(config_path, overrides, pipeline="reconstruct")


@main.command()
@_global_options
@click.option("--ensemble-kind", type=click.Choice(ENSEMBLE_KINDS), default=None,
              help="Which family to enumerate.")
@click.option("--ensemble-n", type=int, default=None,
              help="Family size parameter.")
def ensembles(config_path, **overrides):
    """Enumerate a desk-scale permutation family, one per line."""
    _run(config_path, overrides, pipeline="ensembles")


@main.command()
@_global_options
@click.option("--mc-walks", type=int, default=None,
              help="Random walks for the Monte Carlo cross-check.")
@click.option("--ensemble-n", type=int, default=None,
              help="Size for the re-rooting closure check.")
@click.option("--rho", type=float, default=None,
              help="Increment correlation for the walk cross-check.")
def verify(config_path, **overrides):
    """Run the built-in cross-check suite."""
    _run(config_path, overrides, pipeline="verify")


if __name__ == "__main__":
    main()
