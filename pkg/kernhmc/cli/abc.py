import click
from kernhmc.core.cli import cli, config_options, exit_on_error, prepare_command
from kernhmc.experiments import AbcConfig, run_abc


@cli.command(
    help="""Sample the ABC posterior of the skew-normal location with
pseudo-marginal kernel HMC and random-walk Metropolis, and tabulate the
log-normal posterior next to its Gaussian-likelihood approximation.

OUTPUT_DIR the directory the chains, autocorrelations (autocorrelation.csv),
first-coordinate histograms (histogram.csv), the log-normal table
(lognormal.csv) and the report are written to

The observed data is read from the 'fixture' file, the packaged one by
default."""
)
@click.argument("output_dir", type=click.Path(file_okay=False))
@config_options
@exit_on_error
def abc(output_dir, config_path, overrides, loglevel):
    config = prepare_command(AbcConfig, config_path, overrides, loglevel)
    report = run_abc(config, output_dir)
    lognormal = report["lognormal"]
    click.echo(
        f"Log-normal posterior mean: true {lognormal['true_posterior_mean']:.4f}, "
        f"Gaussian approximation {lognormal['synthetic_posterior_mean']:.4f}"
    )
