"""Kernel Hamiltonian Monte Carlo: HMC whose trajectories follow the gradient of
a kernel exponential family surrogate learned from the chain history, while the
acceptance step uses the (possibly estimated) target density only"""
import logging
import numpy as np
from kernhmc.exceptions import KernhmcError
from kernhmc.core.enum import Algorithm, EstimatorKind, KernelFamily
from kernhmc.core.estimators import (
    FiniteModel,
    cross_validate,
    finite_grad,
    fit_finite_batch,
    fit_lite,
    fit_lite_lowrank,
)
from kernhmc.core.estimators.finite import finite_absorb
from kernhmc.core.features import sample_basis
from kernhmc.core.kernels import KernelSpec
from kernhmc.core.streams import make_rng
from kernhmc.core.target import Target
from .base import (
    ADAPTATION_STREAM,
    CV_STREAM,
    AdaptationEvent,
    ChainResult,
    ChainState,
    SamplerConfig,
    StepSizeAdapter,
    run_mh,
    should_adapt,
)
from .baselines import run_hmc, run_rw
from .proposals import hamiltonian_proposal


logger = logging.getLogger("kernhmc")


class KernelSurrogate:
    """Owns the surrogate of one chain and decides, before every proposal,
    whether and how to update it from the history. Until a model has been
    fitted the surrogate is zero, so trajectories are free-particle moves and the
    sampler behaves like a random walk with Gaussian drift"""

    estimator: EstimatorKind

    def __init__(self, config: SamplerConfig, dim: int):
        self.config = config
        self.dim = dim
        self.adapt_rng = make_rng(config.seed, ADAPTATION_STREAM)
        self.cv_rng = make_rng(config.seed, CV_STREAM)
        self.sigma = None if config.sigma == "cv" else config.sigma
        self.lambda_ = None if config.lambda_ == "cv" else config.lambda_
        self.model = None
        self.hyperparameters = []

    @property
    def ready(self) -> bool:
        return self.sigma is not None and self.lambda_ is not None

    def grad(self, x) -> np.ndarray:
        if self.model is None:
            return np.zeros(self.dim)
        return self._grad(x)

    def log_f(self, x) -> float:
        if self.model is None:
            return 0.0
        return float(self.model.log_density(x)[0])

    def _grad(self, x) -> np.ndarray:
        raise NotImplementedError

    def _refit(self, t: int, history: np.ndarray, relearned: bool):
        raise NotImplementedError

    def _learn_hyperparameters(self, t: int, history: np.ndarray) -> bool:
        config = self.config
        if (config.sigma != "cv" and config.lambda_ != "cv") or (
            t not in config.cv.iterations
        ):
            return False
        if t < config.cv.folds:
            return False
        n = min(config.cv.max_points, t)
        data = history[self.cv_rng.choice(t, size=n, replace=False)]
        sigma_grid = config.cv.sigma_grid if config.sigma == "cv" else [config.sigma]
        lambda_grid = (
            config.cv.lambda_grid if config.lambda_ == "cv" else [config.lambda_]
        )
        try:
            result = cross_validate(
                data,
                sigma_grid,
                lambda_grid,
                folds=config.cv.folds,
                estimator=self.estimator,
                seed=config.seed,
                m=config.n_basis,
                family=config.family,
                rq_alpha=config.rq_alpha,
                lowrank_tol=config.lowrank_tol,
            )
        except KernhmcError as e:
            logger.warning("Cross-validation at iteration %d failed: %s", t, e)
            return False
        self.sigma = result.sigma
        self.lambda_ = result.lambda_
        self.hyperparameters.append(
            {"iteration": t, "sigma": result.sigma, "lambda": result.lambda_}
        )
        logger.debug(
            "Learned sigma=%g, lambda=%g at iteration %d", self.sigma, self.lambda_, t
        )
        return True

    def __call__(self, t: int, state: ChainState, chain: ChainResult):
        """Hook run before the proposal of iteration t"""
        stop = self.config.stop_adaptation_at
        if t == 0 or (stop is not None and t > stop):
            return AdaptationEvent()
        history = chain.samples[:t]
        relearned = self._learn_hyperparameters(t, history)
        if not self.ready:
            return AdaptationEvent()
        adapt = should_adapt(self.config.schedule, t, self.adapt_rng)
        if not (adapt or relearned or t == stop):
            return AdaptationEvent()
        try:
            self._refit(t, history, relearned)
        except KernhmcError as e:
            logger.warning(
                "Refitting the surrogate at iteration %d failed, keeping the "
                "previous one: %s",
                t,
                e,
            )
            return AdaptationEvent(adapted=False, failed=True)
        if t == stop:
            logger.info("Surrogate frozen at iteration %d", t)
        return AdaptationEvent(adapted=True)


class LiteSurrogate(KernelSurrogate):
    """Refits the dual estimator on a fresh uniform sub-sample of the history of
    size min(n_basis, t) at every adaptation event"""

    estimator = EstimatorKind.lite

    def _grad(self, x):
        return self.model.grad(x)[0]

    def _refit(self, t, history, relearned):
        n = min(self.config.n_basis, t)
        Z = history[self.adapt_rng.choice(t, size=n, replace=False)]
        if self.config.lowrank_tol is None:
            model = fit_lite(Z, self.sigma, self.lambda_)
        else:
            alpha0 = None
            if self.model is not None and not relearned and self.model.n == n:
                alpha0 = self.model.alpha
            model = fit_lite_lowrank(
                Z,
                self.sigma,
                self.lambda_,
                tol=self.config.lowrank_tol,
                max_iters=10 * n,
                alpha0=alpha0,
            )
        self.model = model


class FiniteSurrogate(KernelSurrogate):
    """Absorbs every history point not yet seen at each adaptation event, so the
    fit always covers the whole history, through rank-one up-dates of the
    Cholesky factor (or one refactorisation when many points are pending)"""

    estimator = EstimatorKind.finite

    def __init__(self, config: SamplerConfig, dim: int):
        super().__init__(config, dim)
        self.absorbed = 0
        self.rebuilds = 0
        if self.ready:
            self.model = FiniteModel.initial(self._basis(), self.lambda_)

    def _basis(self):
        if self.config.family is KernelFamily.gaussian:
            spec = KernelSpec.gaussian(self.sigma)
        else:
            spec = KernelSpec.rational_quadratic(self.sigma, self.config.rq_alpha)
        return sample_basis(spec, self.config.n_basis, self.dim, self.config.seed)

    def _grad(self, x):
        return finite_grad(self.model, x)

    def _refit(self, t, history, relearned):
        if relearned or self.model is None:
            self.model = fit_finite_batch(history[:t], self._basis(), self.lambda_)
        else:
            previous = self.model.rebuilds
            self.model = finite_absorb(self.model, history[self.absorbed : t])
            self.rebuilds += self.model.rebuilds - previous
        self.absorbed = t


def _run_kmc(
    target: Target,
    config: SamplerConfig,
    surrogate: KernelSurrogate,
    algorithm: Algorithm,
) -> ChainResult:
    adapter = StepSizeAdapter(
        target_accept=config.resolved_target_accept,
        burn_in=config.burn_in if config.resolved_tune_step else 0,
    )
    chain = run_mh(
        target,
        hamiltonian_proposal(
            surrogate.grad,
            lambda: config.hamiltonian.scaled(adapter.scale),
            log_f=surrogate.log_f,
            step_scale=lambda: adapter.scale,
        ),
        config.T,
        config.seed,
        x0=config.start(target.dim),
        before_step=surrogate,
        after_step=adapter,
        algorithm=str(algorithm),
    )
    chain.surrogate = surrogate.model
    chain.hyperparameters = surrogate.hyperparameters
    logger.info(
        "%s on '%s' finished after %d adaptation events with acceptance %g",
        algorithm,
        target.name,
        chain.adapted.sum(),
        chain.accepted[config.burn_in :].mean(),
    )
    return chain


def run_kmc_lite(target: Target, config: SamplerConfig) -> ChainResult:
    """Kernel HMC with the lite (sub-sampled dual) surrogate

    At iteration t, with probability a_t of the adaptation schedule, the
    surrogate is refitted on a uniform sub-sample of size min(n_basis, t) of the
    history. Proposals follow the surrogate's Hamiltonian flow and are accepted
    with the target density, recycling the stored log-target of the current
    state. Hyper-parameters set to "cv" are learned on the history at the
    configured cross-validation iterations, before which the surrogate is zero.
    Far away from the sub-sample the surrogate gradient vanishes, so the sampler
    falls back to a random walk there"""
    surrogate = LiteSurrogate(config, target.dim)
    return _run_kmc(target, config, surrogate, Algorithm.kmc_lite)


def run_kmc_finite(target: Target, config: SamplerConfig) -> ChainResult:
    """Kernel HMC with the finite (random Fourier feature) surrogate, updated
    online at a cost per absorbed point independent of the history length. See
    `run_kmc_lite` for the adaptation and acceptance logic"""
    surrogate = FiniteSurrogate(config, target.dim)
    chain = _run_kmc(target, config, surrogate, Algorithm.kmc_finite)
    chain.factor_rebuilds = surrogate.rebuilds
    return chain


def run_sampler(target: Target, config: SamplerConfig) -> ChainResult:
    """Runs the sampler named by `config.algorithm`"""
    if config.algorithm is Algorithm.rw:
        return run_rw(
            target,
            config.T,
            target_accept=config.resolved_target_accept,
            seed=config.seed,
            burn_in=config.burn_in if config.resolved_tune_step else 0,
            x0=config.start(target.dim),
            initial_scale=config.rw_scale,
        )
    if config.algorithm is Algorithm.hmc:
        return run_hmc(target, config)
    if config.algorithm is Algorithm.kmc_lite:
        return run_kmc_lite(target, config)
    return run_kmc_finite(target, config)

