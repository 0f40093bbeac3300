import click
from kernhmc.core.cli import cli, config_options, exit_on_error, prepare_command
from kernhmc.experiments import BananaConfig, run_banana


@cli.command(
    help="""Run random-walk, HMC and kernel HMC chains on the banana target with
repeated seeds, kernel samplers over a ladder of basis sizes.

OUTPUT_DIR the directory the per-run rows (runs.csv), the aggregated rows
(aggregate.csv) and the report are written to

Acceptance rate, norm of the empirical mean and minimum ESS are computed after
burn-in. HMC and random-walk step sizes are tuned during burn-in towards 0.8
and 0.234 acceptance."""
)
@click.argument("output_dir", type=click.Path(file_okay=False))
@config_options
@exit_on_error
def banana(output_dir, config_path, overrides, loglevel):
    config = prepare_command(BananaConfig, config_path, overrides, loglevel)
    report = run_banana(config, output_dir)
    for row in report["aggregate"]:
        n = row["n"] if row["n"] is not None else "-"
        click.echo(
            f"{row['sampler']} n={n}: acceptance {row['acceptance']:.3f}, "
            f"mean norm {row['mean_norm']:.3f}, min ESS {row['min_ess']:.1f}"
        )
