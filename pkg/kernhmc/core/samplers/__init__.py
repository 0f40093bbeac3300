from .base import (
    AdaptationEvent,
    AdaptationSchedule,
    ChainResult,
    ChainState,
    CVConfig,
    MHProposal,
    SamplerConfig,
    StepSizeAdapter,
    run_mh,
    should_adapt,
)
from .proposals import hamiltonian_proposal, random_walk_proposal
from .baselines import run_hmc, run_rw
from .kmc import (
    FiniteSurrogate,
    KernelSurrogate,
    LiteSurrogate,
    run_kmc_finite,
    run_kmc_lite,
    run_sampler,
)
