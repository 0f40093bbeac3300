import functools
import sys
import typing as ty
import click
from kernhmc import __version__
from kernhmc.exceptions import KernhmcInputError, KernhmcNumericError
from .utils import fromdict, load_yaml, parse_value, set_loggers, set_nested


# Define the base CLI entrypoint
@click.group()
@click.version_option(version=__version__)
def cli():
    pass


# exit codes of the two error families
INPUT_ERROR_EXIT_CODE = 1
NUMERIC_ERROR_EXIT_CODE = 2


def exit_on_error(func):
    """Reports kernhmc errors raised by a command as 'Error: <msg>' on stderr and
    exits with the code of their family"""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except KernhmcInputError as e:
            click.echo(f"Error: {e.msg}", err=True)
            sys.exit(INPUT_ERROR_EXIT_CODE)
        except KernhmcNumericError as e:
            click.echo(f"Error: {e.msg}", err=True)
            sys.exit(NUMERIC_ERROR_EXIT_CODE)

    return wrapper


def load_config(
    klass: type, config_path: ty.Optional[str], overrides: ty.Sequence[str]
):
    """Reads a YAML config file, applies KEY.PATH=VALUE overrides and resolves
    the result into the given config class"""
    dct = load_yaml(config_path) if config_path is not None else {}
    if not isinstance(dct, dict):
        raise KernhmcInputError(f"Config file '{config_path}' is not a mapping")
    for override in overrides:
        if "=" not in override:
            raise KernhmcInputError(
                f"Overrides must be of the form KEY.PATH=VALUE, found '{override}'"
            )
        path, value = override.split("=", 1)
        set_nested(dct, path.strip(), parse_value(value))
    return fromdict(klass, dct)


def config_options(func):
    """Options shared by the experiment commands"""
    func = click.option(
        "--loglevel",
        type=str,
        default="info",
        help="The level of detail logging information is presented",
    )(func)
    func = click.option(
        "--set",
        "overrides",
        multiple=True,
        metavar="KEY.PATH=VALUE",
        help=(
            "Overrides a config value, e.g. --set sampler.T=500. Values are "
            "parsed as JSON where possible"
        ),
    )(func)
    func = click.option(
        "--config",
        "config_path",
        type=click.Path(dir_okay=False),
        default=None,
        help="YAML file with the command's parameters, defaults are used if omitted",
    )(func)
    return func


def prepare_command(klass, config_path, overrides, loglevel):
    set_loggers(loglevel)
    return load_config(klass, config_path, overrides)
