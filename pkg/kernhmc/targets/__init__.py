import typing as ty
from kernhmc.exceptions import KernhmcInputError
from kernhmc.core.target import Target
from .gaussian import (
    make_gaussian,
    make_isotropic_gaussian,
    make_rotated_gamma_gaussian,
    random_rotation,
    rotated_gamma_covariance,
)
from .banana import (
    BananaParams,
    banana_gradient,
    banana_log_density,
    banana_sample,
    make_banana,
)
from .abc import (
    ABCObservation,
    ABCParams,
    abc_estimate_log_likelihood,
    make_abc_target,
    skew_normal_log_density,
    skew_normal_simulate,
)
from .lognormal import (
    lognormal_data,
    lognormal_true_posterior,
    synthetic_gaussian_posterior,
)
from .noisy import make_noisy


def _abc(fixture=None, **params):
    observation = ABCObservation.load(fixture) if fixture else ABCObservation.load()
    abc_params = ABCParams(**params)
    return make_abc_target(abc_params, observation.summary())


TARGETS = {
    "isotropic_gaussian": make_isotropic_gaussian,
    "rotated_gamma_gaussian": make_rotated_gamma_gaussian,
    "banana": lambda **params: make_banana(BananaParams(**params)),
    "abc": _abc,
}


def make_target(name: str, params: ty.Optional[dict] = None, noise_sd=0.0) -> Target:
    """Builds one of the benchmark targets by name from a block of parameters, as
    they appear in experiment config files

    Parameters
    ----------
    name : str
        one of the keys of TARGETS
    params : dict, optional
        keyword arguments of the target's constructor
    noise_sd : float
        when positive the target is wrapped by `make_noisy`
    """
    try:
        factory = TARGETS[name]
    except KeyError:
        raise KernhmcInputError(
            f"Unrecognised target '{name}', valid options are " + ", ".join(TARGETS)
        )
    try:
        target = factory(**(params or {}))
    except (TypeError, ValueError) as e:
        raise KernhmcInputError(f"Invalid parameters for target '{name}': {e}")
    if noise_sd:
        target = make_noisy(target, noise_sd)
    return target
