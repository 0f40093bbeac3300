"""The Metropolis-Hastings engine shared by every sampler, the types describing
a chain and the adaptation schedules"""
import csv
import json
import logging
import typing as ty
from pathlib import Path
import attrs
import numpy as np
from kernhmc.exceptions import (
    KernhmcFileFormatError,
    KernhmcInputError,
    KernhmcNumericError,
)
from kernhmc.core.diagnostics import acceptance_rate, mean_norm, min_ess
from kernhmc.core.dynamics import HamiltonianParams
from kernhmc.core.enum import Algorithm, KernelFamily
from kernhmc.core.streams import make_rng
from kernhmc.core.target import Target
from kernhmc.core.utils import as_vector


logger = logging.getLogger("kernhmc")

# JSON summaries written alongside chain CSVs
SUMMARY_SCHEMA_VERSION = 1

# sub-streams of a chain's seed
PROPOSAL_STREAM = 0
ADAPTATION_STREAM = 1
CV_STREAM = 2


def _unit_interval(instance, attribute, value):
    if not 0 <= value <= 1:
        raise ValueError(f"'{attribute.name}' must lie in [0, 1], found {value}")


def _exponent_range(instance, attribute, value):
    if not 0 < value <= 1:
        raise ValueError(f"'{attribute.name}' must lie in (0, 1], found {value}")


@attrs.define(frozen=True)
class AdaptationSchedule:
    """Vanishing adaptation: at iteration t the surrogate is updated with
    probability a_t = min(1, scale * (t + 1)^-exponent). With exponent <= 1
    the probabilities decay to zero while their sum diverges. scale = 0 turns
    adaptation off

    Parameters
    ----------
    exponent : float
        decay exponent in (0, 1]
    scale : float
        multiplier in [0, 1]
    """

    exponent: float = attrs.field(
        default=0.5, converter=float, validator=_exponent_range
    )
    scale: float = attrs.field(default=1.0, converter=float, validator=_unit_interval)

    def probability(self, t: int) -> float:
        if t < 0:
            raise KernhmcInputError(f"Iteration must be non-negative, found {t}")
        return min(1.0, self.scale * (t + 1) ** (-self.exponent))


def should_adapt(
    schedule: AdaptationSchedule, t: int, rng: np.random.Generator
) -> bool:
    """Draws whether to adapt at iteration t"""
    return bool(rng.uniform() < schedule.probability(t))


def _positive(instance, attribute, value):
    if not value > 0:
        raise ValueError(f"'{attribute.name}' must be positive, found {value}")


def parse_hyperparameter(value):
    if isinstance(value, str):
        if value.lower() != "cv":
            raise ValueError(f"Expected a positive number or 'cv', found '{value}'")
        return "cv"
    value = float(value)
    if not value > 0:
        raise ValueError(f"Hyper-parameters must be positive, found {value}")
    return value


@attrs.define(frozen=True)
class CVConfig:
    """Cross-validation of the surrogate's bandwidth and regulariser on the chain
    history, used when either is set to "cv"

    Parameters
    ----------
    sigma_grid : list of float
    lambda_grid : list of float
    folds : int
    iterations : list of int
        iterations at which the hyper-parameters are (re-)learned
    max_points : int
        size of the uniform sub-sample of the history cross-validation runs on
    """

    sigma_grid: ty.List[float] = attrs.field(
        factory=lambda: [0.25, 1.0, 4.0, 16.0, 64.0],
        converter=lambda v: [float(x) for x in v],
    )
    lambda_grid: ty.List[float] = attrs.field(
        factory=lambda: [1e-3, 1e-2, 1e-1, 1.0],
        converter=lambda v: [float(x) for x in v],
    )
    folds: int = attrs.field(default=5, converter=int)
    iterations: ty.List[int] = attrs.field(
        factory=lambda: [500, 2000], converter=lambda v: sorted(int(x) for x in v)
    )
    max_points: int = attrs.field(default=500, converter=int, validator=_positive)


@attrs.define(frozen=True)
class SamplerConfig:
    """Everything that determines a chain

    Parameters
    ----------
    algorithm : Algorithm
        which sampler to run
    T : int
        number of iterations
    burn_in : int
        iterations discarded by diagnostics, and during which step sizes are tuned
    seed : int
        seed of the chain's random streams
    hamiltonian : HamiltonianParams
        step size and step count ranges of (kernel) HMC proposals
    rw_scale : float
        initial standard deviation of random-walk proposals (scaled by
        1 / sqrt(d))
    target_accept : float, optional
        acceptance rate step sizes are tuned towards during burn-in, defaults to
        0.234 for RW and 0.8 otherwise
    tune_step : bool, optional
        whether to tune step sizes during burn-in, defaults to True for RW and
        HMC and False for the kernel samplers
    n_basis : int
        sub-sample size of the lite surrogate or number of random features of
        the finite surrogate
    sigma : float or "cv"
        kernel bandwidth of the surrogate
    lambda_ : float or "cv"
        regulariser of the surrogate
    family : KernelFamily
        kernel of the finite surrogate's random features
    rq_alpha : float
        shape of the rational-quadratic kernel
    lowrank_tol : float, optional
        when given the lite surrogate is fitted through incomplete Cholesky and
        conjugate gradient with this tolerance
    schedule : AdaptationSchedule
        the vanishing adaptation schedule
    stop_adaptation_at : int, optional
        iteration from which the surrogate is frozen
    cv : CVConfig
        cross-validation settings used when sigma or lambda_ is "cv"
    x0 : list of float, optional
        starting point, the origin if not provided
    """

    algorithm: Algorithm = attrs.field(
        default=Algorithm.kmc_finite, converter=Algorithm.parse
    )
    T: int = attrs.field(default=2200, converter=int, validator=_positive)
    burn_in: int = attrs.field(default=2000, converter=int)
    seed: int = attrs.field(default=0, converter=int)
    hamiltonian: HamiltonianParams = attrs.field(factory=HamiltonianParams)
    rw_scale: float = attrs.field(default=2.38, converter=float, validator=_positive)
    target_accept: ty.Optional[float] = attrs.field(default=None)
    tune_step: ty.Optional[bool] = attrs.field(default=None)
    n_basis: int = attrs.field(default=1000, converter=int, validator=_positive)
    sigma: ty.Union[float, str] = attrs.field(
        default="cv", converter=parse_hyperparameter
    )
    lambda_: ty.Union[float, str] = attrs.field(
        default="cv", converter=parse_hyperparameter
    )
    family: KernelFamily = attrs.field(
        default=KernelFamily.gaussian, converter=KernelFamily.parse
    )
    rq_alpha: float = attrs.field(default=1.0, converter=float, validator=_positive)
    lowrank_tol: ty.Optional[float] = attrs.field(default=None)
    schedule: AdaptationSchedule = attrs.field(factory=AdaptationSchedule)
    stop_adaptation_at: ty.Optional[int] = attrs.field(default=None)
    cv: CVConfig = attrs.field(factory=CVConfig)
    x0: ty.Optional[ty.List[float]] = attrs.field(default=None)

    def __attrs_post_init__(self):
        if not 0 <= self.burn_in < self.T:
            raise ValueError(
                f"Burn-in ({self.burn_in}) must lie in [0, T) for T={self.T}"
            )
        if self.target_accept is not None and not 0 < self.target_accept < 1:
            raise ValueError(
                f"Target acceptance must lie in (0, 1), found {self.target_accept}"
            )

    @property
    def resolved_target_accept(self) -> float:
        if self.target_accept is not None:
            return self.target_accept
        return 0.234 if self.algorithm is Algorithm.rw else 0.8

    @property
    def resolved_tune_step(self) -> bool:
        if self.tune_step is not None:
            return bool(self.tune_step)
        return self.algorithm in (Algorithm.rw, Algorithm.hmc)

    def start(self, dim: int) -> np.ndarray:
        if self.x0 is None:
            return np.zeros(dim)
        return as_vector(self.x0, dim=dim, name="x0")


@attrs.define(frozen=True)
class ChainState:
    """Current state of a chain. `stored_log_target` is the value computed when
    `position` was accepted and is reused until the next acceptance"""

    position: np.ndarray = attrs.field(eq=False)
    stored_log_target: float = attrs.field()
    iteration: int = attrs.field()


@attrs.define(frozen=True, eq=False)
class MHProposal:
    """What a proposal callback returns

    Parameters
    ----------
    position : np.ndarray
        the proposed point
    log_correction : float
        log q(x | x*) - log q(x* | x) plus, for Hamiltonian proposals, the
        kinetic energy difference
    eps : float
        leapfrog step size (nan for random-walk proposals)
    L : int
        number of leapfrog steps (0 for random-walk proposals)
    step_scale : float
        multiplier of the proposal's step size in effect
    diverged : bool
        if True the proposal is rejected without evaluating the target
    """

    position: np.ndarray = attrs.field()
    log_correction: float = attrs.field(default=0.0)
    eps: float = attrs.field(default=float("nan"))
    L: int = attrs.field(default=0)
    step_scale: float = attrs.field(default=1.0)
    diverged: bool = attrs.field(default=False)


@attrs.define
class AdaptationEvent:
    """Outcome of the before-proposal hook of an iteration"""

    adapted: bool = False
    failed: bool = False


CSV_FLAGS = ("accepted", "adapted", "proposal_failed", "refit_failed", "diverged")


@attrs.define(eq=False)
class ChainResult:
    """A complete chain together with per-iteration records

    Parameters
    ----------
    samples : np.ndarray
        T x d states after every iteration
    accepted : np.ndarray
        whether iteration t accepted its proposal
    adapted : np.ndarray
        whether the surrogate was updated at iteration t
    log_targets : np.ndarray
        stored log-target of the state after iteration t
    eps : np.ndarray
        leapfrog step size of iteration t's proposal (nan for random walks)
    L : np.ndarray
        leapfrog steps of iteration t's proposal (0 for random walks)
    step_scale : np.ndarray
        tuned step-size multiplier in effect at iteration t
    proposal_failed : np.ndarray
        iterations whose proposal raised an error and counted as rejections
    refit_failed : np.ndarray
        iterations at which refitting the surrogate failed
    diverged : np.ndarray
        iterations whose trajectory diverged
    x0 : np.ndarray
        the starting point
    algorithm : str
    target_name : str
    surrogate : object, optional
        the final surrogate model of the kernel samplers
    hyperparameters : list of dict
        (iteration, sigma, lambda) every time hyper-parameters were learned
    factor_rebuilds : int
        number of times a rank-one Cholesky up-date of the finite surrogate
        failed and its factor was rebuilt
    """

    samples: np.ndarray = attrs.field(repr=False)
    accepted: np.ndarray = attrs.field(repr=False)
    adapted: np.ndarray = attrs.field(repr=False)
    log_targets: np.ndarray = attrs.field(repr=False)
    eps: np.ndarray = attrs.field(repr=False)
    L: np.ndarray = attrs.field(repr=False)
    step_scale: np.ndarray = attrs.field(repr=False)
    proposal_failed: np.ndarray = attrs.field(repr=False)
    refit_failed: np.ndarray = attrs.field(repr=False)
    diverged: np.ndarray = attrs.field(repr=False)
    x0: np.ndarray = attrs.field(repr=False)
    algorithm: str = attrs.field(default="")
    target_name: str = attrs.field(default="")
    surrogate: ty.Any = attrs.field(default=None, repr=False)
    hyperparameters: ty.List[dict] = attrs.field(factory=list)
    factor_rebuilds: int = attrs.field(default=0)

    @property
    def T(self):
        return self.samples.shape[0]

    @property
    def d(self):
        return self.samples.shape[1]

    @classmethod
    def empty(cls, T: int, x0: np.ndarray, **kwargs):
        d = x0.shape[0]
        return cls(
            samples=np.empty((T, d)),
            accepted=np.zeros(T, dtype=bool),
            adapted=np.zeros(T, dtype=bool),
            log_targets=np.empty(T),
            eps=np.full(T, np.nan),
            L=np.zeros(T, dtype=int),
            step_scale=np.ones(T),
            proposal_failed=np.zeros(T, dtype=bool),
            refit_failed=np.zeros(T, dtype=bool),
            diverged=np.zeros(T, dtype=bool),
            x0=x0.copy(),
            **kwargs,
        )

    def post_burn_in(self, burn_in: int) -> np.ndarray:
        return self.samples[burn_in:]

    def header(self):
        return (
            ["iteration"]
            + [f"x{i + 1}" for i in range(self.d)]
            + ["log_target", "eps", "L", "step_scale"]
            + list(CSV_FLAGS)
        )

    def to_csv(self, path: ty.Union[str, Path]):
        """One row per iteration at full float precision"""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(self.header())
            for t in range(self.T):
                writer.writerow(
                    [t]
                    + [repr(float(v)) for v in self.samples[t]]
                    + [
                        repr(float(self.log_targets[t])),
                        repr(float(self.eps[t])),
                        int(self.L[t]),
                        repr(float(self.step_scale[t])),
                    ]
                    + [int(getattr(self, flag)[t]) for flag in CSV_FLAGS]
                )

    @classmethod
    def from_csv(cls, path: ty.Union[str, Path]) -> "ChainResult":
        """Reads a chain written by `to_csv`. Columns other than the coordinates
        are optional, so plain sample files (a header row and one point per
        row, coordinates named x1, x2, ...) can be read as well"""
        path = Path(path)
        if not path.exists():
            raise KernhmcInputError(f"Chain file '{path}' does not exist")
        with open(path, newline="") as f:
            reader = csv.reader(f)
            try:
                header = next(reader)
            except StopIteration:
                raise KernhmcFileFormatError(path, 1, "file is empty")
            coords = [i for i, name in enumerate(header) if name.startswith("x")]
            if not coords:
                raise KernhmcFileFormatError(path, 1, "no coordinate columns (x1, ...)")
            columns = {name: i for i, name in enumerate(header)}
            rows = []
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != len(header):
                    raise KernhmcFileFormatError(
                        path,
                        lineno,
                        f"expected {len(header)} fields, found {len(row)}",
                    )
                try:
                    rows.append([float(v) for v in row])
                except ValueError as e:
                    raise KernhmcFileFormatError(path, lineno, str(e))
        if not rows:
            raise KernhmcFileFormatError(path, 2, "no samples")
        data = np.array(rows)
        T = data.shape[0]
        samples = data[:, coords]

        def column(name, default, dtype=float):
            if name in columns:
                return data[:, columns[name]].astype(dtype)
            return np.full(T, default, dtype=dtype)

        return cls(
            samples=samples,
            accepted=column("accepted", True, bool),
            adapted=column("adapted", False, bool),
            log_targets=column("log_target", np.nan),
            eps=column("eps", np.nan),
            L=column("L", 0, int),
            step_scale=column("step_scale", 1.0),
            proposal_failed=column("proposal_failed", False, bool),
            refit_failed=column("refit_failed", False, bool),
            diverged=column("diverged", False, bool),
            x0=samples[0].copy(),
        )

    def summary(self, burn_in: int = 0) -> dict:
        """Acceptance rate, ESS and mean norm of the post-burn-in chain"""
        kept = self.post_burn_in(burn_in)
        summary = {
            "schema_version": SUMMARY_SCHEMA_VERSION,
            "algorithm": self.algorithm,
            "target": self.target_name,
            "T": self.T,
            "burn_in": burn_in,
            "acceptance_rate": acceptance_rate(self.accepted, burn_in),
            "mean_norm": mean_norm(kept),
            "adaptation_events": int(self.adapted.sum()),
            "proposal_failures": int(self.proposal_failed.sum()),
            "refit_failures": int(self.refit_failed.sum()),
            "divergences": int(self.diverged.sum()),
            "factor_rebuilds": self.factor_rebuilds,
            "hyperparameters": self.hyperparameters,
        }
        if kept.shape[0] >= 10:
            summary["ess"] = min_ess(kept).to_dict()
        return summary

    def save_summary(self, path: ty.Union[str, Path], burn_in: int = 0):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as f:
            json.dump(self.summary(burn_in), f, indent=2)


def run_mh(
    target: Target,
    propose: ty.Callable[[ChainState, np.random.Generator], MHProposal],
    T: int,
    seed: int,
    x0=None,
    before_step: ty.Optional[
        ty.Callable[[int, ChainState, ChainResult], AdaptationEvent]
    ] = None,
    after_step: ty.Optional[ty.Callable[[int, float], None]] = None,
    algorithm: str = "mh",
) -> ChainResult:
    """Runs a Metropolis-Hastings chain

    The log-target of the current state is computed once, when the state is
    accepted, and reused in every later acceptance ratio until the next
    acceptance. For targets that only provide an estimate of their density this
    is what makes the chain exact (pseudo-marginal): the current state is never
    re-estimated, and the estimates of rejected proposals are discarded.

    Parameters
    ----------
    target : Target
        the density to sample from
    propose : callable
        (state, rng) -> MHProposal. Errors raised by the callback count as a
        rejection and are flagged in `proposal_failed`
    T : int
        number of iterations
    seed : int
        seed of the chain's proposal stream
    x0 : np.ndarray, optional
        starting point, the origin if not provided
    before_step : callable, optional
        (t, state, chain so far) -> AdaptationEvent, called before each proposal
        (used to update surrogates)
    after_step : callable, optional
        (t, acceptance probability) called after each iteration (used to tune
        step sizes)
    algorithm : str
        label stored with the result

    Returns
    -------
    ChainResult
    """
    if T < 1:
        raise KernhmcInputError(f"Chain length must be positive, found {T}")
    rng = make_rng(seed, PROPOSAL_STREAM)
    x0 = np.zeros(target.dim) if x0 is None else as_vector(x0, dim=target.dim)
    log_target = target.evaluate(x0, rng)
    if not np.isfinite(log_target):
        raise KernhmcNumericError(
            f"Log-target at the starting point {x0} is not finite ({log_target})"
        )
    state = ChainState(x0.copy(), log_target, 0)
    chain = ChainResult.empty(T, x0, algorithm=algorithm, target_name=target.name)
    for t in range(T):
        if before_step is not None:
            event = before_step(t, state, chain)
            chain.adapted[t] = event.adapted
            chain.refit_failed[t] = event.failed
        alpha = 0.0
        try:
            proposal = propose(state, rng)
        except Exception as e:
            logger.debug("Proposal failed at iteration %d: %s", t, e)
            chain.proposal_failed[t] = True
            proposal = None
        if proposal is not None:
            chain.eps[t] = proposal.eps
            chain.L[t] = proposal.L
            chain.step_scale[t] = proposal.step_scale
            chain.diverged[t] = proposal.diverged
        if proposal is not None and not proposal.diverged:
            candidate = target.evaluate(proposal.position, rng)
            log_ratio = candidate - state.stored_log_target + proposal.log_correction
            if np.isnan(log_ratio):
                chain.proposal_failed[t] = True
            else:
                alpha = float(np.exp(min(0.0, log_ratio)))
                if np.log(rng.uniform()) < log_ratio:
                    state = ChainState(
                        np.array(proposal.position, dtype=float), candidate, t + 1
                    )
                    chain.accepted[t] = True
        chain.samples[t] = state.position
        chain.log_targets[t] = state.stored_log_target
        if after_step is not None:
            after_step(t, alpha)
    return chain


@attrs.define
class StepSizeAdapter:
    """Robbins-Monro tuning of a log step-size multiplier towards a target
    acceptance rate, active only during burn-in

    Parameters
    ----------
    target_accept : float
        the acceptance rate to reach
    burn_in : int
        number of iterations the multiplier is adapted for
    decay : float
        exponent of the gain sequence (t + 1)^-decay
    """

    target_accept: float = attrs.field()
    burn_in: int = attrs.field()
    decay: float = attrs.field(default=0.6)
    log_scale: float = attrs.field(default=0.0)

    @property
    def scale(self) -> float:
        return float(np.exp(self.log_scale))

    def __call__(self, t: int, alpha: float):
        if t < self.burn_in:
            self.log_scale += (t + 1) ** (-self.decay) * (alpha - self.target_accept)
        elif t == self.burn_in:
            logger.debug("Step-size multiplier frozen at %g", self.scale)
