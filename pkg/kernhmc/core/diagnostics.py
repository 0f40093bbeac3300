"""Chain quality metrics: acceptance rates, autocorrelation, effective sample
size, the norm of the empirical mean and a polynomial-kernel MMD"""
import logging
import typing as ty
import attrs
import numpy as np
import scipy.fft
from kernhmc.exceptions import (
    KernhmcDegenerateSeriesError,
    KernhmcDimensionError,
    KernhmcInputError,
)
from .utils import as_matrix, as_vector


logger = logging.getLogger("kernhmc")


def _autocovariance(x: np.ndarray, max_lag: int) -> np.ndarray:
    T = x.shape[0]
    centred = x - x.mean()
    n_fft = scipy.fft.next_fast_len(2 * T, real=True)
    spectrum = scipy.fft.rfft(centred, n_fft)
    acov = scipy.fft.irfft(spectrum * np.conj(spectrum), n_fft)[: max_lag + 1]
    return acov / T


def autocorrelation(series, max_lag: int) -> np.ndarray:
    """Normalised empirical autocorrelation rho_0 (= 1), ..., rho_max_lag

    Raises
    ------
    KernhmcDegenerateSeriesError
        if the series is constant, so its variance is zero
    """
    x = as_vector(series, name="series")
    T = x.shape[0]
    if not 1 <= max_lag < T:
        raise KernhmcInputError(
            f"Need 1 <= max_lag < T, found max_lag={max_lag} for T={T}"
        )
    acov = _autocovariance(x, max_lag)
    if not acov[0] > 0 or np.ptp(x) == 0:
        raise KernhmcDegenerateSeriesError(
            "Autocorrelation of a constant series is undefined"
        )
    return acov / acov[0]


@attrs.define(frozen=True, eq=False)
class EssReport:
    """Effective sample sizes of every coordinate of a chain

    Parameters
    ----------
    per_dim : np.ndarray
        ESS of each coordinate, in (0, T]
    min_ess : float
        smallest ESS over coordinates
    truncation_lags : np.ndarray
        lag at which the autocorrelation sum was truncated, per coordinate
    degenerate : np.ndarray
        True for constant coordinates, whose ESS is reported as T
    """

    per_dim: np.ndarray = attrs.field()
    min_ess: float = attrs.field()
    truncation_lags: np.ndarray = attrs.field()
    degenerate: np.ndarray = attrs.field()

    def to_dict(self):
        return {
            "min_ess": float(self.min_ess),
            "per_dim": self.per_dim.tolist(),
            "truncation_lags": self.truncation_lags.tolist(),
            "degenerate": self.degenerate.tolist(),
        }


def effective_sample_size(series) -> ty.Tuple[float, int]:
    """ESS of a scalar series, T / (1 + 2 sum_k rho_k), with the sum truncated
    by Geyer's initial positive sequence: autocorrelations are summed in
    adjacent pairs (rho_2k + rho_2k+1) for as long as the pair sums stay positive

    Returns
    -------
    ess : float
        clamped to at most T
    lag : int
        the last lag included in the sum
    """
    x = as_vector(series, name="series")
    T = x.shape[0]
    rho = autocorrelation(x, T - 1)
    n_pairs = T // 2
    pairs = rho[: 2 * n_pairs].reshape(n_pairs, 2).sum(axis=1)
    non_positive = np.flatnonzero(pairs <= 0)
    K = int(non_positive[0]) if non_positive.size else n_pairs
    tau = -1.0 + 2.0 * pairs[:K].sum()
    if tau <= 0:
        return float(T), 2 * K - 1
    return float(min(T, T / tau)), 2 * K - 1


def min_ess(samples) -> EssReport:
    """Per-coordinate ESS of a T x d chain and its minimum. Constant coordinates
    are reported with ESS T and flagged as degenerate"""
    samples = as_matrix(samples, name="samples")
    T, d = samples.shape
    if T < 10:
        raise KernhmcInputError(f"ESS needs at least 10 samples, found {T}")
    per_dim = np.empty(d)
    lags = np.zeros(d, dtype=int)
    degenerate = np.zeros(d, dtype=bool)
    for i in range(d):
        try:
            per_dim[i], lags[i] = effective_sample_size(samples[:, i])
        except KernhmcDegenerateSeriesError:
            logger.warning("Coordinate %d of the chain is constant", i)
            per_dim[i] = T
            degenerate[i] = True
    return EssReport(
        per_dim=per_dim,
        min_ess=float(per_dim.min()),
        truncation_lags=lags,
        degenerate=degenerate,
    )


def _poly3_mean(X, Y):
    return float(np.mean((1.0 + X @ Y.T) ** 3))


def mmd_poly3(X, Y) -> float:
    """Maximum mean discrepancy with the kernel (1 + <x, y>)^3, which compares all
    mixed moments up to order three. The biased V-statistic is used, so that
    identical sample sets give exactly zero; the square root of MMD^2 is
    returned"""
    X = as_matrix(X, name="X")
    Y = as_matrix(Y, name="Y")
    if X.shape[0] < 1 or Y.shape[0] < 1:
        raise KernhmcInputError("MMD needs at least one sample in each set")
    if X.shape[1] != Y.shape[1]:
        raise KernhmcDimensionError(
            f"Sample sets have different dimensions ({X.shape[1]}, {Y.shape[1]})"
        )
    mmd2 = _poly3_mean(X, X) + _poly3_mean(Y, Y) - 2 * _poly3_mean(X, Y)
    return float(np.sqrt(max(mmd2, 0.0)))


def mmd_curve(samples, reference, checkpoints: ty.Sequence[int]):
    """MMD between the first t samples of a chain and a reference sample, for
    every t in `checkpoints`

    Returns
    -------
    list of (int, float)
    """
    samples = as_matrix(samples, name="samples")
    curve = []
    for t in checkpoints:
        if not 1 <= t <= samples.shape[0]:
            raise KernhmcInputError(
                f"Checkpoint {t} outside the chain's {samples.shape[0]} samples"
            )
        curve.append((int(t), mmd_poly3(samples[:t], reference)))
    return curve


def mean_norm(samples) -> float:
    """Euclidean norm of the empirical mean"""
    samples = as_matrix(samples, name="samples")
    if samples.shape[0] < 1:
        raise KernhmcInputError("Mean norm needs at least one sample")
    return float(np.linalg.norm(samples.mean(axis=0)))


def acceptance_rate(flags, burn_in: int = 0) -> float:
    """Fraction of accepted proposals after the first `burn_in` iterations"""
    flags = np.asarray(flags, dtype=bool).ravel()
    if not 0 <= burn_in < flags.shape[0]:
        raise KernhmcInputError(
            f"Burn-in ({burn_in}) must be smaller than the chain length "
            f"({flags.shape[0]})"
        )
    return float(flags[burn_in:].mean())
