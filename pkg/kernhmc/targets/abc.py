"""Approximate Bayesian computation on a skew-normal simulator: the likelihood of
the observed summary is estimated by averaging a Gaussian similarity kernel over
simulated data sets, which gives a noisy but unbiased likelihood the samplers
can use in pseudo-marginal mode"""
import typing as ty
from pathlib import Path
import attrs
import numpy as np
import scipy.special
from kernhmc.exceptions import KernhmcDimensionError, KernhmcInputError
from kernhmc.core.streams import make_rng
from kernhmc.core.target import Target
from kernhmc.core.utils import (
    FORMAT_VERSION,
    as_vector,
    check_format_version,
    load_yaml,
    save_yaml,
)
from .gaussian import make_isotropic_gaussian


DEFAULT_FIXTURE = Path(__file__).parent / "fixtures" / "abc_observed.yaml"


def skew_normal_log_density(y, theta, alpha) -> float:
    """log of 2 N(y; theta, I) Phi(<alpha, y - theta>)"""
    y = as_vector(y, name="y")
    theta = as_vector(theta, dim=y.shape[0], name="theta")
    alpha = as_vector(alpha, dim=y.shape[0], name="alpha")
    r = y - theta
    return float(
        np.log(2.0)
        - 0.5 * y.shape[0] * np.log(2 * np.pi)
        - 0.5 * r @ r
        + scipy.special.log_ndtr(alpha @ r)
    )


def skew_normal_simulate(theta, alpha, rng: np.random.Generator, size=None):
    """Draws from the skew-normal with location theta, identity scale and skew
    alpha through its additive representation

        y = theta + delta |z_0| + (I - delta delta^T)^(1/2) z,
        delta = alpha / sqrt(1 + |alpha|^2)

    where the matrix square root only rescales z along delta's direction.

    Parameters
    ----------
    theta : np.ndarray
        location (d-vector)
    alpha : np.ndarray
        skew (d-vector)
    rng : numpy.random.Generator
        random stream
    size : int or tuple of int, optional
        leading shape of the returned draws, a single d-vector if None
    """
    theta = as_vector(theta, name="theta")
    d = theta.shape[0]
    alpha = as_vector(alpha, name="alpha")
    if alpha.shape[0] != d:
        raise KernhmcDimensionError(
            f"Skew ({alpha.shape[0]}) and location ({d}) dimensions differ"
        )
    shape = () if size is None else np.atleast_1d(size).tolist()
    shape = tuple(int(s) for s in shape)
    delta = alpha / np.sqrt(1.0 + alpha @ alpha)
    delta_norm = np.sqrt(delta @ delta)
    z0 = np.abs(rng.standard_normal(shape))
    z = rng.standard_normal(shape + (d,))
    if delta_norm > 0:
        u = delta / delta_norm
        along = z @ u
        z = z + ((np.sqrt(1.0 - delta_norm**2) - 1.0) * along)[..., None] * u
    return theta + z0[..., None] * delta + z


def _positive(instance, attribute, value):
    if not value > 0:
        raise ValueError(f"'{attribute.name}' must be positive, found {value}")


def _default_skew(params):
    return np.full(params.theta_dim, 10.0)


@attrs.define(frozen=True, eq=False)
class ABCParams:
    """Parameters of the skew-normal ABC likelihood

    Parameters
    ----------
    theta_dim : int
        dimension of the parameter (and of the summary statistic)
    epsilon : float
        bandwidth of the Gaussian similarity kernel
    n_lik : int
        simulated data sets per likelihood estimate
    alpha : np.ndarray
        skew of the simulator
    batch_size : int
        draws per simulated data set, summarised by their mean. The packaged
        observation is a batch of the same size
    prior_sd : float
        standard deviation of the isotropic zero-mean Gaussian prior
    """

    theta_dim: int = attrs.field(default=10, converter=int, validator=_positive)
    epsilon: float = attrs.field(default=0.55, converter=float, validator=_positive)
    n_lik: int = attrs.field(default=10, converter=int, validator=_positive)
    alpha: np.ndarray = attrs.field(
        default=attrs.Factory(_default_skew, takes_self=True),
        converter=as_vector,
    )
    batch_size: int = attrs.field(default=10, converter=int, validator=_positive)
    prior_sd: float = attrs.field(default=100.0, converter=float, validator=_positive)

    def __attrs_post_init__(self):
        if self.alpha.shape[0] != self.theta_dim:
            raise KernhmcDimensionError(
                f"Skew has dimension {self.alpha.shape[0]}, expected {self.theta_dim}"
            )

    @property
    def prior(self) -> Target:
        return make_isotropic_gaussian(self.theta_dim, self.prior_sd**2)


def simulate_summaries(theta, params: ABCParams, rng: np.random.Generator):
    """n_lik x theta_dim batch-mean summaries of simulated data sets"""
    draws = skew_normal_simulate(
        theta, params.alpha, rng, size=(params.n_lik, params.batch_size)
    )
    return draws.mean(axis=1)


def abc_estimate_log_likelihood(
    theta, y_obs_summary, params: ABCParams, rng: np.random.Generator
) -> float:
    """log of (1 / n_lik) sum_i N(y_obs_summary; x_i, epsilon^2 I), x_i being the
    summaries of n_lik data sets simulated at theta. The average (not its log) is
    an unbiased estimate of the ABC likelihood"""
    theta = as_vector(theta, dim=params.theta_dim, name="theta")
    y_obs_summary = as_vector(y_obs_summary, dim=params.theta_dim, name="y_obs")
    summaries = simulate_summaries(theta, params, rng)
    sq = ((summaries - y_obs_summary) ** 2).sum(axis=1)
    log_kernel = -0.5 * sq / params.epsilon**2 - 0.5 * params.theta_dim * np.log(
        2 * np.pi * params.epsilon**2
    )
    return float(scipy.special.logsumexp(log_kernel) - np.log(params.n_lik))


@attrs.define(frozen=True, eq=False)
class ABCObservation:
    """How the observed data set was generated: a batch of `n_obs` skew-normal
    draws at `theta_true` from the Philox stream `seed`, summarised by its mean"""

    theta_true: np.ndarray = attrs.field(converter=as_vector)
    alpha: np.ndarray = attrs.field(converter=as_vector)
    n_obs: int = attrs.field(converter=int, validator=_positive)
    seed: int = attrs.field(converter=int)

    def data(self) -> np.ndarray:
        return skew_normal_simulate(
            self.theta_true, self.alpha, make_rng(self.seed), size=self.n_obs
        )

    def summary(self) -> np.ndarray:
        return self.data().mean(axis=0)

    def to_dict(self):
        return {
            "format_version": FORMAT_VERSION,
            "theta_true": self.theta_true.tolist(),
            "alpha": self.alpha.tolist(),
            "n_obs": self.n_obs,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, dct):
        check_format_version(dct, "ABC observation")
        try:
            return cls(
                theta_true=dct["theta_true"],
                alpha=dct["alpha"],
                n_obs=dct["n_obs"],
                seed=dct["seed"],
            )
        except KeyError as e:
            raise KernhmcInputError(f"ABC observation is missing field {e}")

    def save(self, path: ty.Union[str, Path]):
        save_yaml(self.to_dict(), path)

    @classmethod
    def load(cls, path: ty.Union[str, Path] = DEFAULT_FIXTURE):
        return cls.from_dict(load_yaml(path))


def make_abc_target(params: ABCParams, y_obs_summary) -> Target:
    """ABC posterior: the prior times the estimated likelihood. Only an estimate
    of the density is available, so samplers run it in pseudo-marginal mode"""
    y_obs_summary = as_vector(y_obs_summary, dim=params.theta_dim, name="y_obs")
    prior = params.prior

    def estimate(theta, rng):
        return prior.log_density(theta) + abc_estimate_log_likelihood(
            theta, y_obs_summary, params, rng
        )

    return Target(
        dim=params.theta_dim,
        estimate_log_density=estimate,
        name="abc_skew_normal",
    )
