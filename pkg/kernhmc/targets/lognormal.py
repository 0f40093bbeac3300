"""The log-normal mean model: its conjugate Gaussian posterior and the posterior
obtained when the likelihood is replaced by a Gaussian fitted to a few simulated
draws, which is biased upwards because the log-normal is positively skewed"""
import typing as ty
import numpy as np
import scipy.special
from kernhmc.exceptions import KernhmcGridTruncationError, KernhmcInputError
from kernhmc.core.streams import make_rng
from kernhmc.core.utils import as_vector

# largest probability mass allowed on either end of the evaluation grid
GRID_TRUNCATION_TOL = 1e-6
# sub-stream of the simulations, kept apart from the data drawn from the same seed
SIMULATION_STREAM = 1
# simulation sets evaluated together on the grid
SET_CHUNK = 100


def _check(data, tau0, tau):
    data = as_vector(data, name="data") if np.size(data) else np.zeros(0)
    if np.any(data <= 0):
        raise KernhmcInputError("Log-normal data must be positive")
    if not (tau0 > 0 and tau > 0):
        raise KernhmcInputError(
            f"Precisions must be positive, found tau0={tau0}, tau={tau}"
        )
    return data


def lognormal_data(n: int, mu: float, tau: float, seed: int) -> np.ndarray:
    """n draws of exp(N(mu, 1 / tau))"""
    rng = make_rng(seed)
    return np.exp(mu + rng.standard_normal(n) / np.sqrt(tau))


def lognormal_true_posterior(
    data, mu0: float, tau0: float, tau: float
) -> ty.Tuple[float, float]:
    """Conjugate posterior of mu given y_i ~ logN(mu, 1 / tau) and the prior
    mu ~ N(mu0, 1 / tau0)

    Returns
    -------
    mean : float
        (tau0 mu0 + tau sum log y_i) / (tau0 + n tau)
    precision : float
        tau0 + n tau
    """
    data = _check(data, tau0, tau)
    precision = tau0 + data.shape[0] * tau
    mean = (tau0 * mu0 + tau * np.log(data).sum()) / precision
    return float(mean), float(precision)


def simulated_moments(
    n_lik: int, n_sets: int, tau: float, seed: int
) -> ty.Tuple[np.ndarray, np.ndarray]:
    """Sample mean and variance of n_lik draws of exp(z / sqrt(tau)) in each of
    n_sets independent simulation sets. The draws at mu are exp(mu) times these,
    so the moments at any mu are the returned ones scaled by exp(mu) and
    exp(2 mu), and every grid point sees the same random numbers"""
    if n_lik < 2:
        raise KernhmcInputError(
            f"At least 2 simulations are needed for a variance, found {n_lik}"
        )
    if n_sets < 1:
        raise KernhmcInputError(
            f"Number of simulation sets must be positive, found {n_sets}"
        )
    z = make_rng(seed, SIMULATION_STREAM).standard_normal((n_sets, n_lik))
    draws = np.exp(z / np.sqrt(tau))
    return draws.mean(axis=1), draws.var(axis=1, ddof=1)


def synthetic_gaussian_posterior(
    data,
    mu_grid,
    mu0: float,
    tau0: float,
    tau: float,
    epsilon: float,
    n_lik: ty.Optional[int] = 10,
    n_sets: int = 1000,
    seed: int = 0,
) -> np.ndarray:
    """Posterior of mu on a grid when every observation is modelled as
    N(mu_hat, sigma_hat^2 + epsilon^2), mu_hat and sigma_hat^2 being the sample
    mean and variance of n_lik log-normal draws simulated at mu.

    The log-likelihood is averaged over n_sets simulation sets, which is the
    target a gradient scheme drawing fresh simulations at every step settles on.
    Few simulations rarely reach the long right tail of the log-normal, so
    sigma_hat^2 is typically far below the true variance and the posterior is
    pushed towards larger mu. With ``n_lik=None`` the exact moments
    exp(mu + 1 / (2 tau)) and (exp(1 / tau) - 1) exp(2 mu + 1 / tau) are used
    instead.

    Parameters
    ----------
    data : np.ndarray
        positive observations
    mu_grid : np.ndarray
        increasing, evenly spaced grid of mu values
    mu0, tau0 : float
        mean and precision of the Gaussian prior on mu
    tau : float
        known precision of log y
    epsilon : float
        standard deviation of the Gaussian similarity kernel
    n_lik : int or None
        simulations per likelihood estimate, the exact moments if None
    n_sets : int
        independent simulation sets the log-likelihood is averaged over
    seed : int
        seed of the simulation stream

    Returns
    -------
    np.ndarray
        posterior probability of each grid point, summing to one

    Raises
    ------
    KernhmcGridTruncationError
        if either end point of the grid carries more than GRID_TRUNCATION_TOL of
        the mass
    """
    data = _check(data, tau0, tau)
    mu_grid = as_vector(mu_grid, name="mu_grid")
    if mu_grid.shape[0] < 3 or np.any(np.diff(mu_grid) <= 0):
        raise KernhmcInputError("Grid must hold at least 3 increasing values")
    if not epsilon >= 0:
        raise KernhmcInputError(f"Epsilon must be non-negative, found {epsilon}")
    if n_lik is None:
        means = np.array([np.exp(0.5 / tau)])
        variances = np.array([np.expm1(1.0 / tau) * np.exp(1.0 / tau)])
    else:
        means, variances = simulated_moments(n_lik, n_sets, tau, seed)
    n = data.shape[0]
    log_lik = np.zeros_like(mu_grid)
    if n:
        # sum_i (y_i - m)^2 = n (spread + (ybar - m)^2)
        ybar, spread = data.mean(), data.var()
        scale = np.exp(mu_grid)
        for start in range(0, means.shape[0], SET_CHUNK):
            mean = means[start : start + SET_CHUNK, None] * scale
            var = variances[start : start + SET_CHUNK, None] * scale**2 + epsilon**2
            log_lik -= (
                0.5
                * n
                * (np.log(2 * np.pi * var) + (spread + (ybar - mean) ** 2) / var)
            ).sum(axis=0)
        log_lik /= means.shape[0]
    log_prior = -0.5 * tau0 * (mu_grid - mu0) ** 2
    log_post = log_lik + log_prior
    weights = np.exp(log_post - scipy.special.logsumexp(log_post))
    if max(weights[0], weights[-1]) > GRID_TRUNCATION_TOL:
        raise KernhmcGridTruncationError(
            f"Posterior mass at the ends of the grid [{mu_grid[0]}, {mu_grid[-1]}] "
            f"exceeds {GRID_TRUNCATION_TOL}, widen the grid"
        )
    return weights


def grid_mean(mu_grid, weights) -> float:
    return float(np.asarray(mu_grid) @ np.asarray(weights))


def gaussian_on_grid(mu_grid, mean: float, precision: float) -> np.ndarray:
    """Discretised N(mean, 1 / precision) on the grid, normalised to sum to one,
    for tabulating next to `synthetic_gaussian_posterior`"""
    mu_grid = as_vector(mu_grid, name="mu_grid")
    log_w = -0.5 * precision * (mu_grid - mean) ** 2
    return np.exp(log_w - scipy.special.logsumexp(log_w))
