import numpy as np
from kernhmc.exceptions import KernhmcInputError
from kernhmc.core.target import Target


def make_noisy(target: Target, noise_sd: float) -> Target:
    """Wraps a target with an exact log-density so that only an unbiased, noisy
    estimate of its density is exposed: the density is multiplied by W with
    log W ~ N(-noise_sd^2 / 2, noise_sd^2), so E[W] = 1. Samplers then run in
    pseudo-marginal mode while the exact parts stay available for diagnostics

    Parameters
    ----------
    target : Target
        the target to wrap, must have an exact log-density
    noise_sd : float
        standard deviation of the log-noise
    """
    if target.log_density is None:
        raise KernhmcInputError(
            f"Cannot add noise to '{target.name}' as it has no exact log-density"
        )
    if not noise_sd >= 0:
        raise KernhmcInputError(f"Noise level must be non-negative, found {noise_sd}")
    log_density = target.log_density
    shift = -0.5 * noise_sd**2

    def estimate(x, rng: np.random.Generator):
        return log_density(x) + shift + noise_sd * rng.standard_normal()

    return Target(
        dim=target.dim,
        log_density=log_density,
        estimate_log_density=estimate,
        gradient=target.gradient,
        sampler=target.sampler,
        name=f"noisy_{target.name}",
    )
