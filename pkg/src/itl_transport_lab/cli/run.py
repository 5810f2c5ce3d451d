"""
CLI for running transport-lab experiments.

Usage:
    itl-transport-run run experiment.cfg
    itl-transport-run run experiment.json --seed 7 --out runs/quasi --threads 4
    itl-transport-run experiments
    itl-transport-run --help

Environment:
    ITL_LAB_THREADS, ITL_LAB_LOG_LEVEL, ITL_LAB_OUTPUT_DIR: runtime defaults
"""
import logging
import sys
from pathlib import Path
from typing import Optional

import click

from itl_transport_lab.core.exceptions import ConfigurationError, TransportLabError
from itl_transport_lab.runner import config_from_mapping, experiment_registry, parse_config, run_experiment
from itl_transport_lab.settings import get_settings

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

logger = logging.getLogger(__name__)


@click.group()
@click.option("--verbose", "-v", is_flag=True, help="Enable debug logging")
@click.pass_context
def cli(ctx, verbose: bool):
    """Run spectral transport experiments."""
    ctx.ensure_object(dict)
    level = logging.DEBUG if verbose else getattr(logging, get_settings().log_level.upper(), logging.INFO)
    logging.basicConfig(level=level, format=LOG_FORMAT)
    ctx.obj["verbose"] = verbose


@cli.command()
@click.argument("config_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--seed", type=int, default=None, help="Override the configured seed")
@click.option("--out", "out_dir", type=click.Path(file_okay=False, path_type=Path), default=None,
              help="Artifact directory (default: config output_dir or ITL_LAB_OUTPUT_DIR)")
@click.option("--threads", type=int, default=None, help="Worker threads for ensemble integration")
@click.pass_context
def run(ctx, config_file: Path, seed: Optional[int], out_dir: Optional[Path], threads: Optional[int]):
    """Run the experiment described by CONFIG_FILE."""
    try:
        config = parse_config(config_file.read_text())
        overrides = {key: value for key, value in (("seed", seed), ("threads", threads)) if value is not None}
        if overrides:
            config = config_from_mapping({**config.model_dump(), **overrides})
    except ConfigurationError as e:
        click.echo(f"✗ Invalid configuration: {e.message}", err=True)
        logger.error("Configuration error", extra=e.to_log_dict())
        sys.exit(2)

    try:
        result = run_experiment(config, out_dir)
    except ConfigurationError as e:
        click.echo(f"✗ Invalid configuration: {e.message}", err=True)
        logger.error("Configuration error", extra=e.to_log_dict())
        sys.exit(2)
    except TransportLabError as e:
        click.echo(f"✗ Experiment {config.experiment.value} failed: {e.message}", err=True)
        logger.error("Experiment error", extra=e.to_log_dict())
        sys.exit(1)

    for verdict in result.verdicts:
        mark = "✓" if verdict.passed else "✗"
        click.echo(
            f"{mark} {verdict.test}: z={verdict.z_score:.3f} "
            f"(threshold {verdict.effective_threshold:.3f}, n={verdict.count})"
        )
    if result.passed:
        click.echo(f"✓ {config.experiment.value} completed")
    else:
        click.echo(f"✗ {config.experiment.value} failed verification", err=True)
    sys.exit(result.exit_code)


@cli.command()
def experiments():
    """List the available experiments."""
    for name in experiment_registry.list_experiments():
        click.echo(name)


if __name__ == "__main__":
    cli()
