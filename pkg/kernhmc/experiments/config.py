"""Config blocks of the experiment commands. Each command reads one YAML file
into one of these classes through `kernhmc.core.utils.fromdict`; defaults give
desk-scale runs (10 trials where a study repeats runs)"""
import typing as ty
import attrs
from kernhmc.core.dynamics import HamiltonianParams
from kernhmc.core.enum import Algorithm, EstimatorKind, KernelFamily
from kernhmc.core.samplers import AdaptationSchedule, SamplerConfig
from kernhmc.core.samplers.base import CVConfig, parse_hyperparameter
from kernhmc.core.target import Target
from kernhmc.targets import make_target
from kernhmc.targets.abc import ABCParams
from kernhmc.targets.banana import BananaParams


def _floats(values):
    return [float(v) for v in values]


def _ints(values):
    return [int(v) for v in values]


def _positive(instance, attribute, value):
    if not value > 0:
        raise ValueError(f"'{attribute.name}' must be positive, found {value}")


def _algorithms(instance, attribute, value):
    if not value:
        raise ValueError(f"'{attribute.name}' must not be empty")
    for name in value:
        Algorithm.parse(name)


def _templated(factory):
    return attrs.field(factory=factory, metadata={"template": factory})


def _non_empty(instance, attribute, value):
    if not value:
        raise ValueError(f"'{attribute.name}' must not be empty")


@attrs.define
class TargetConfig:
    """A benchmark target selected by name (see `kernhmc.targets.TARGETS`)"""

    name: str = attrs.field(default="isotropic_gaussian")
    params: dict = attrs.field(factory=lambda: {"d": 2})
    noise_sd: float = attrs.field(default=0.0, converter=float)

    def build(self) -> Target:
        return make_target(self.name, self.params, noise_sd=self.noise_sd)


@attrs.define
class GridConfig:
    """Cross-validation grids of the kernel bandwidth and regulariser"""

    sigma_grid: ty.List[float] = attrs.field(
        factory=lambda: [0.5, 2.0, 8.0, 32.0], converter=_floats, validator=_non_empty
    )
    lambda_grid: ty.List[float] = attrs.field(
        factory=lambda: [1e-3, 1e-1], converter=_floats, validator=_non_empty
    )
    folds: int = attrs.field(default=5, converter=int)


@attrs.define
class FitConfig:
    """Fits a surrogate to a sample file

    Parameters
    ----------
    input : str
        CSV sample file (header row, one point per row)
    estimator : EstimatorKind
        "lite" or "finite"
    sigma, lambda_ : float or "cv"
        hyper-parameters, learned by cross-validation when "cv"
    m : int
        number of random features of the finite estimator
    family : KernelFamily
        kernel of the random features
    rq_alpha : float
        rational-quadratic shape
    lowrank_tol : float, optional
        fit the lite estimator through incomplete Cholesky with this tolerance
    cv : GridConfig
        cross-validation grids
    seed : int
        seed of the folds and random features
    reference : TargetConfig, optional
        when given, the report includes the mean squared error of the
        surrogate's gradient against the reference target's exact gradient
    grid_low, grid_high, grid_points : float, float, int
        evaluation grid of the gradient error for 1-dimensional inputs (higher
        dimensional inputs are evaluated on the samples themselves)
    """

    input: str = attrs.field(default="samples.csv")
    estimator: EstimatorKind = attrs.field(
        default=EstimatorKind.lite, converter=EstimatorKind.parse
    )
    sigma: ty.Union[float, str] = attrs.field(
        default="cv", converter=parse_hyperparameter
    )
    lambda_: ty.Union[float, str] = attrs.field(
        default="cv", converter=parse_hyperparameter
    )
    m: int = attrs.field(default=300, converter=int, validator=_positive)
    family: KernelFamily = attrs.field(
        default=KernelFamily.gaussian, converter=KernelFamily.parse
    )
    rq_alpha: float = attrs.field(default=1.0, converter=float)
    lowrank_tol: ty.Optional[float] = attrs.field(default=None)
    cv: GridConfig = attrs.field(factory=GridConfig)
    seed: int = attrs.field(default=0, converter=int)
    reference: ty.Optional[dict] = attrs.field(default=None)
    grid_low: float = attrs.field(default=-3.0, converter=float)
    grid_high: float = attrs.field(default=3.0, converter=float)
    grid_points: int = attrs.field(default=61, converter=int)


@attrs.define
class SampleConfig:
    """Runs one chain on a target

    Parameters
    ----------
    target : TargetConfig
        the target
    sampler : SamplerConfig
        the sampler and all its settings
    reference_samples : int
        number of exact target draws to compare the chain with by MMD, 0 to skip
    mmd_checkpoints : list of int
        numbers of post-burn-in samples the MMD curve is evaluated at, the
        whole post-burn-in chain if empty
    """

    target: TargetConfig = attrs.field(factory=TargetConfig)
    sampler: SamplerConfig = attrs.field(factory=SamplerConfig)
    reference_samples: int = attrs.field(default=0, converter=int)
    mmd_checkpoints: ty.List[int] = attrs.field(factory=list, converter=_ints)


def _trajectory_grids():
    return GridConfig(
        sigma_grid=[0.5, 1.0, 2.0, 4.0, 8.0], lambda_grid=[1e-3, 1e-1, 10.0]
    )


@attrs.define
class TrajectoriesConfig:
    """Compares trajectories driven by the exact gradient with trajectories
    driven by a finite surrogate trained on exact draws from the target

    Parameters
    ----------
    target : TargetConfig
        a target with exact log-density, gradient and sampler
    n_train : int
        number of exact draws the surrogate is trained on
    m : int
        number of random features
    sigma, lambda_ : float or "cv"
        surrogate hyper-parameters
    family : KernelFamily
        kernel of the random features
    rq_alpha : float
        rational-quadratic shape
    cv : GridConfig
        grids used when a hyper-parameter is "cv"
    eps : float
        leapfrog step size
    L : int
        number of leapfrog steps
    n_trajectories : int
        number of matched start points
    seed : int
    """

    target: TargetConfig = attrs.field(factory=TargetConfig)
    n_train: int = attrs.field(default=2000, converter=int, validator=_positive)
    m: int = attrs.field(default=500, converter=int, validator=_positive)
    sigma: ty.Union[float, str] = attrs.field(
        default="cv", converter=parse_hyperparameter
    )
    lambda_: ty.Union[float, str] = attrs.field(
        default="cv", converter=parse_hyperparameter
    )
    family: KernelFamily = attrs.field(
        default=KernelFamily.gaussian, converter=KernelFamily.parse
    )
    rq_alpha: float = attrs.field(default=1.0, converter=float)
    cv: GridConfig = _templated(_trajectory_grids)
    eps: float = attrs.field(default=0.1, converter=float, validator=_positive)
    L: int = attrs.field(default=20, converter=int, validator=_positive)
    n_trajectories: int = attrs.field(default=10, converter=int, validator=_positive)
    seed: int = attrs.field(default=0, converter=int)


def _benchmark_grids():
    return GridConfig(sigma_grid=[1.0, 4.0, 16.0, 64.0], lambda_grid=[1e-2, 1.0, 100.0])


def _fixed_trajectory():
    return HamiltonianParams(eps_min=0.1, eps_max=0.1, L_min=20, L_max=20)


@attrs.define
class AcceptanceBenchmarkConfig:
    """Hypothetical acceptance of kernel-induced trajectories as a function of the
    dimension and of the number of training samples (= number of features)

    Parameters
    ----------
    target : str
        "rotated_gamma_gaussian" or "isotropic_gaussian"
    dims : list of int
        dimensions to evaluate
    sizes : list of int
        values of n = m to evaluate
    trials : int
        independent repetitions per (d, n)
    n_trajectories : int
        trajectories simulated per trial, started from exact draws
    hamiltonian : HamiltonianParams
        step size and step count ranges
    sigma, lambda_ : float or "cv"
        surrogate hyper-parameters
    family : KernelFamily
        kernel of the random features
    rq_alpha : float
        rational-quadratic shape
    cv : GridConfig
        grids used when a hyper-parameter is "cv"
    cv_points : int
        largest number of draws (and features) cross-validation runs on
    seed : int
    workers : int
        number of processes trials are spread over
    """

    target: str = attrs.field(default="isotropic_gaussian")
    dims: ty.List[int] = attrs.field(
        factory=lambda: [2, 8, 16], converter=_ints, validator=_non_empty
    )
    sizes: ty.List[int] = attrs.field(
        factory=lambda: [200, 500, 1000, 2000], converter=_ints, validator=_non_empty
    )
    trials: int = attrs.field(default=10, converter=int, validator=_positive)
    n_trajectories: int = attrs.field(default=20, converter=int, validator=_positive)
    hamiltonian: HamiltonianParams = _templated(_fixed_trajectory)
    sigma: ty.Union[float, str] = attrs.field(
        default="cv", converter=parse_hyperparameter
    )
    lambda_: ty.Union[float, str] = attrs.field(
        default="cv", converter=parse_hyperparameter
    )
    family: KernelFamily = attrs.field(
        default=KernelFamily.gaussian, converter=KernelFamily.parse
    )
    rq_alpha: float = attrs.field(default=1.0, converter=float)
    cv: GridConfig = _templated(_benchmark_grids)
    cv_points: int = attrs.field(default=200, converter=int, validator=_positive)
    seed: int = attrs.field(default=0, converter=int)
    workers: int = attrs.field(default=1, converter=int, validator=_positive)

    @target.validator
    def target_validator(self, _, target):
        if target not in ("rotated_gamma_gaussian", "isotropic_gaussian"):
            raise ValueError(
                f"Acceptance benchmark target must be 'rotated_gamma_gaussian' or "
                f"'isotropic_gaussian', found '{target}'"
            )


def _banana_sampler():
    return SamplerConfig(
        T=2200,
        burn_in=2000,
        sigma="cv",
        lambda_="cv",
        hamiltonian=HamiltonianParams(eps_min=0.5, eps_max=1.0, L_min=10, L_max=20),
    )


@attrs.define
class BananaConfig:
    """Mixing of the samplers on the banana after burn-in, as the number of
    history points / features grows

    Parameters
    ----------
    banana : BananaParams
        the target
    sizes : list of int
        values of n = m for the kernel samplers
    samplers : list of str
        algorithms to run (rw, hmc, kmc_lite, kmc_finite)
    trials : int
        repeated seeds per (sampler, size)
    sampler : SamplerConfig
        settings shared by all samplers; algorithm, n_basis and seed are set
        per run
    seed : int
        base seed, trial i runs with seed + i
    workers : int
        number of processes runs are spread over
    """

    banana: BananaParams = attrs.field(factory=BananaParams)
    sizes: ty.List[int] = attrs.field(
        factory=lambda: [200, 500, 1000, 2000], converter=_ints, validator=_non_empty
    )
    samplers: ty.List[str] = attrs.field(
        factory=lambda: ["rw", "hmc", "kmc_finite"], validator=_algorithms
    )
    trials: int = attrs.field(default=10, converter=int, validator=_positive)
    sampler: SamplerConfig = _templated(_banana_sampler)
    seed: int = attrs.field(default=0, converter=int)
    workers: int = attrs.field(default=1, converter=int, validator=_positive)


def _abc_sampler():
    return SamplerConfig(
        T=5200,
        burn_in=200,
        n_basis=200,
        sigma="cv",
        lambda_="cv",
        hamiltonian=HamiltonianParams(eps_min=0.01, eps_max=0.1, L_min=50, L_max=50),
        schedule=AdaptationSchedule(exponent=0.5, scale=1.0),
        stop_adaptation_at=200,
        cv=CVConfig(iterations=[200]),
    )


@attrs.define
class LogNormalConfig:
    """The log-normal mean model used to show the bias of a Gaussian likelihood
    approximation

    Parameters
    ----------
    n : int
        number of observations
    mu_true : float
        mean of log y the observations are generated with
    mu0, tau0 : float
        prior mean and precision
    tau : float
        known precision of log y
    epsilon : float
        similarity kernel width of the Gaussian approximation
    n_lik : int, optional
        simulations the Gaussian approximation is fitted to, the exact
        log-normal moments if None
    n_sets : int
        simulation sets the approximate log-likelihood is averaged over
    grid_low, grid_high : float
        evaluation grid bounds
    grid_points : int
        evaluation grid resolution
    seed : int
    """

    n: int = attrs.field(default=100, converter=int)
    mu_true: float = attrs.field(default=2.0, converter=float)
    mu0: float = attrs.field(default=0.0, converter=float)
    tau0: float = attrs.field(default=0.01, converter=float)
    tau: float = attrs.field(default=1.0, converter=float)
    epsilon: float = attrs.field(default=0.1, converter=float)
    n_lik: ty.Optional[int] = attrs.field(
        default=10, converter=attrs.converters.optional(int)
    )
    n_sets: int = attrs.field(default=1000, converter=int, validator=_positive)
    grid_low: float = attrs.field(default=0.0, converter=float)
    grid_high: float = attrs.field(default=4.0, converter=float)
    grid_points: int = attrs.field(default=4001, converter=int)
    seed: int = attrs.field(default=0, converter=int)


@attrs.define
class AbcConfig:
    """Pseudo-marginal sampling of the skew-normal ABC posterior plus the
    log-normal counterexample table

    Parameters
    ----------
    abc : ABCParams
        likelihood estimator settings
    fixture : str, optional
        observed-data file, the packaged one if not given
    samplers : list of str
        algorithms to run (kmc_lite, kmc_finite, rw)
    sampler : SamplerConfig
        settings shared by all samplers
    max_lag : int
        largest lag of the autocorrelation table
    bins : int
        histogram bins of the first coordinate's marginal
    lognormal : LogNormalConfig
        the counterexample
    """

    abc: ABCParams = attrs.field(factory=ABCParams)
    fixture: ty.Optional[str] = attrs.field(default=None)
    samplers: ty.List[str] = attrs.field(
        factory=lambda: ["kmc_lite", "rw"], validator=_algorithms
    )
    sampler: SamplerConfig = _templated(_abc_sampler)
    max_lag: int = attrs.field(default=100, converter=int, validator=_positive)
    bins: int = attrs.field(default=50, converter=int, validator=_positive)
    lognormal: LogNormalConfig = attrs.field(factory=LogNormalConfig)
