import click
from kernhmc.core.cli import cli, config_options, exit_on_error, prepare_command
from kernhmc.experiments import TrajectoriesConfig, run_trajectories


@cli.command(
    help="""Compare leapfrog trajectories driven by the target's exact gradient
with trajectories driven by a finite surrogate trained on exact draws, from
the same starting points and momenta.

OUTPUT_DIR the directory the per-step trajectories (trajectories.csv), the
end-point acceptance probabilities (endpoints.csv) and the report are written
to"""
)
@click.argument("output_dir", type=click.Path(file_okay=False))
@config_options
@exit_on_error
def trajectories(output_dir, config_path, overrides, loglevel):
    config = prepare_command(TrajectoriesConfig, config_path, overrides, loglevel)
    report = run_trajectories(config, output_dir)
    click.echo(
        f"Mean end-point acceptance: exact {report['mean_exact_acceptance']:.3f}, "
        f"kernel {report['mean_kernel_acceptance']:.3f}"
    )
