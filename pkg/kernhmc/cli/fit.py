import logging
import click
from kernhmc.core.cli import cli, config_options, exit_on_error, prepare_command
from kernhmc.experiments import FitConfig, run_fit


logger = logging.getLogger("kernhmc")


@cli.command(
    help="""Fit a kernel exponential family surrogate to a sample file by score
matching.

INPUT_FILE a CSV file with a header row and one sample per row

OUTPUT_DIR the directory the model (model.yaml), the fit report (report.json)
and the resolved config are written to

Bandwidth and regulariser set to "cv" (the default) are selected by
cross-validation over the grids of the 'cv' block of the config."""
)
@click.argument("input_file")
@click.argument("output_dir", type=click.Path(file_okay=False))
@config_options
@exit_on_error
def fit(input_file, output_dir, config_path, overrides, loglevel):
    config = prepare_command(FitConfig, config_path, overrides, loglevel)
    config.input = input_file
    report = run_fit(config, output_dir)
    click.echo(
        f"Fitted {report['estimator']} estimator (sigma={report['sigma']:g}, "
        f"lambda={report['lambda']:g}) to {report['n']} samples"
    )
