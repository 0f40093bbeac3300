"""Baseline samplers: tuned random-walk Metropolis and HMC with the exact
gradient of the target"""
import logging
import numpy as np
from kernhmc.exceptions import KernhmcInputError
from kernhmc.core.enum import Algorithm
from kernhmc.core.target import Target
from .base import ChainResult, SamplerConfig, StepSizeAdapter, run_mh
from .proposals import hamiltonian_proposal, random_walk_proposal


logger = logging.getLogger("kernhmc")


def run_rw(
    target: Target,
    T: int,
    target_accept: float = 0.234,
    seed: int = 0,
    burn_in: int = 0,
    x0=None,
    initial_scale: float = 2.38,
) -> ChainResult:
    """Random-walk Metropolis with proposal N(x, s^2 I), s = initial_scale /
    sqrt(d) times a multiplier tuned towards `target_accept` during burn-in only

    Parameters
    ----------
    target : Target
        the density to sample from
    T : int
        number of iterations
    target_accept : float
        acceptance rate the step size is tuned towards
    seed : int
        seed of the chain
    burn_in : int
        number of iterations during which the step size is tuned
    x0 : np.ndarray, optional
        starting point
    initial_scale : float
        step size before tuning, in units of 1 / sqrt(d)
    """
    if not 0 < target_accept < 1:
        raise KernhmcInputError(
            f"Target acceptance must lie in (0, 1), found {target_accept}"
        )
    adapter = StepSizeAdapter(target_accept=target_accept, burn_in=burn_in)
    base = initial_scale / np.sqrt(target.dim)
    chain = run_mh(
        target,
        random_walk_proposal(lambda: base * adapter.scale),
        T,
        seed,
        x0=x0,
        after_step=adapter,
        algorithm=str(Algorithm.rw),
    )
    logger.info(
        "Random walk on '%s' finished with step size %g and acceptance %g",
        target.name,
        base * adapter.scale,
        chain.accepted[burn_in:].mean(),
    )
    return chain


def run_hmc(target: Target, config: SamplerConfig) -> ChainResult:
    """HMC using the exact gradient of the target, the reference the kernel
    samplers are compared against. With `tune_step` the step-size range is
    scaled by a multiplier tuned towards the target acceptance during burn-in"""
    if not target.has_gradient:
        raise KernhmcInputError(
            f"HMC needs the exact gradient of the target, '{target.name}' has none"
        )
    adapter = StepSizeAdapter(
        target_accept=config.resolved_target_accept,
        burn_in=config.burn_in if config.resolved_tune_step else 0,
    )
    chain = run_mh(
        target,
        hamiltonian_proposal(
            target.grad,
            lambda: config.hamiltonian.scaled(adapter.scale),
            log_f=target.log_density,
            step_scale=lambda: adapter.scale,
        ),
        config.T,
        config.seed,
        x0=config.start(target.dim),
        after_step=adapter,
        algorithm=str(Algorithm.hmc),
    )
    logger.info(
        "HMC on '%s' finished with step multiplier %g and acceptance %g",
        target.name,
        adapter.scale,
        chain.accepted[config.burn_in :].mean(),
    )
    return chain

