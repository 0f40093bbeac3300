import json
import click
from kernhmc.core.cli import cli, exit_on_error
from kernhmc.core.utils import set_loggers
from kernhmc.experiments import run_diagnose
from kernhmc.experiments.io import json_safe


@cli.command(
    help="""Compute the acceptance rate, effective sample sizes and norm of the
empirical mean of a chain, and optionally its MMD to a reference sample.

CHAIN a chain file written by 'kernhmc sample', or any CSV sample file with
coordinate columns named x1, x2, ...

The metrics are printed as JSON and written to the --output file if given."""
)
@click.argument("chain")
@click.option(
    "--reference",
    default=None,
    help="CSV sample file to compute the MMD of the chain against",
)
@click.option(
    "--burn-in",
    type=int,
    default=0,
    help="Number of initial iterations to discard",
)
@click.option(
    "--output",
    type=click.Path(dir_okay=False),
    default=None,
    help="JSON file to write the metrics to",
)
@click.option(
    "--loglevel",
    type=str,
    default="warning",
    help="The level of detail logging information is presented",
)
@exit_on_error
def diagnose(chain, reference, burn_in, output, loglevel):
    set_loggers(loglevel)
    metrics = run_diagnose(chain, output=output, reference=reference, burn_in=burn_in)
    click.echo(json.dumps(json_safe(metrics), indent=2))
