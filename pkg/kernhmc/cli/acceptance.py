import click
from kernhmc.core.cli import cli, config_options, exit_on_error, prepare_command
from kernhmc.experiments import AcceptanceBenchmarkConfig, run_acceptance_benchmark


@cli.command(
    name="acceptance-benchmark",
    help="""Hypothetical acceptance of trajectories driven by the finite
surrogate on a Gaussian target, over a grid of dimensions and training sizes
(number of samples = number of features), repeated over seeded trials.

OUTPUT_DIR the directory the per-trial rows (acceptance.csv), the heatmap
(heatmap.csv) and the report are written to

Trials run in parallel when 'workers' is larger than one.""",
)
@click.argument("output_dir", type=click.Path(file_okay=False))
@config_options
@exit_on_error
def acceptance_benchmark(output_dir, config_path, overrides, loglevel):
    config = prepare_command(
        AcceptanceBenchmarkConfig, config_path, overrides, loglevel
    )
    report = run_acceptance_benchmark(config, output_dir)
    for d, row in zip(report["dims"], report["mean_acceptance"]):
        click.echo(
            f"d={d}: "
            + ", ".join(f"n={n}: {a:.3f}" for n, a in zip(report["sizes"], row))
        )
