import click
from kernhmc.core.cli import cli, config_options, exit_on_error, prepare_command
from kernhmc.core.diagnostics import acceptance_rate
from kernhmc.experiments import SampleConfig, run_sample


@cli.command(
    help="""Run a chain on one of the benchmark targets with random-walk
Metropolis, HMC or kernel HMC (lite or finite surrogate).

OUTPUT_DIR the directory the chain (chain.csv), its summary (summary.json) and
the resolved config are written to

The target is selected by the 'target' block of the config (name, params and
an optional noise_sd that turns it into a noisy estimate), the sampler by the
'sampler' block."""
)
@click.argument("output_dir", type=click.Path(file_okay=False))
@config_options
@exit_on_error
def sample(output_dir, config_path, overrides, loglevel):
    config = prepare_command(SampleConfig, config_path, overrides, loglevel)
    chain = run_sample(config, output_dir)
    click.echo(
        f"{chain.algorithm} chain of {chain.T} iterations on '{chain.target_name}', "
        f"acceptance rate after burn-in "
        f"{acceptance_rate(chain.accepted, config.sampler.burn_in):.3f}"
    )
