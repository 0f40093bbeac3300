import typing as ty
import numpy as np
from kernhmc.core.dynamics import HamiltonianParams, kernel_induced_proposal
from .base import ChainState, MHProposal


def random_walk_proposal(
    scale: ty.Callable[[], float],
) -> ty.Callable[[ChainState, np.random.Generator], MHProposal]:
    """Isotropic Gaussian random walk whose standard deviation is read from
    `scale` at every proposal"""

    def propose(state: ChainState, rng: np.random.Generator) -> MHProposal:
        s = scale()
        position = state.position + s * rng.standard_normal(state.position.shape[0])
        return MHProposal(position=position, step_scale=s)

    return propose


def hamiltonian_proposal(
    grad_f: ty.Callable[[np.ndarray], np.ndarray],
    params: ty.Callable[[], HamiltonianParams],
    log_f: ty.Optional[ty.Callable[[np.ndarray], float]] = None,
    step_scale: ty.Callable[[], float] = lambda: 1.0,
) -> ty.Callable[[ChainState, np.random.Generator], MHProposal]:
    """End-points of Hamiltonian trajectories driven by grad_f, which is the
    exact gradient of the log-target for HMC and the surrogate's for the kernel
    samplers. The kinetic energy difference enters the acceptance ratio as the
    proposal's log-correction

    Parameters
    ----------
    grad_f : callable
        gradient of the log-density driving the dynamics. Called anew for every
        proposal, so it may refer to a surrogate that changes between iterations
    params : callable
        returns the step ranges in effect
    log_f : callable, optional
        log-density matching grad_f, used to detect diverging trajectories
    step_scale : callable
        returns the tuned step-size multiplier, recorded with the proposal
    """

    def propose(state: ChainState, rng: np.random.Generator) -> MHProposal:
        proposal = kernel_induced_proposal(
            grad_f, state.position, params(), rng, log_f=log_f
        )
        return MHProposal(
            position=proposal.q_star,
            log_correction=proposal.log_momentum_ratio(),
            eps=proposal.eps,
            L=proposal.L,
            step_scale=step_scale(),
            diverged=proposal.diverged,
        )

    return propose
