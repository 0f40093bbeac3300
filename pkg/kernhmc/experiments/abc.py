"""Pseudo-marginal sampling of the skew-normal ABC posterior and the log-normal
example showing the bias of a Gaussian likelihood approximation"""
import logging
import typing as ty
from pathlib import Path
import attrs
import numpy as np
from kernhmc.exceptions import KernhmcDegenerateSeriesError, KernhmcDimensionError
from kernhmc.core.diagnostics import autocorrelation, mmd_poly3
from kernhmc.core.enum import Algorithm
from kernhmc.core.samplers import run_sampler
from kernhmc.targets.abc import ABCObservation, make_abc_target
from kernhmc.targets.lognormal import (
    gaussian_on_grid,
    grid_mean,
    lognormal_data,
    lognormal_true_posterior,
    synthetic_gaussian_posterior,
)
from .config import AbcConfig, LogNormalConfig
from .io import Timings, prepare_output, write_csv, write_report


logger = logging.getLogger("kernhmc")

# shift applied to a marginal to give the contrast its MMD is compared against
MARGINAL_SHIFT = 0.5


def lognormal_table(config: LogNormalConfig):
    """The conjugate posterior of the log-normal mean next to the posterior under
    the simulated Gaussian likelihood, on a grid

    Returns
    -------
    rows : list
        (mu, true posterior mass, synthetic posterior mass) per grid point
    summary : dict
        the two posterior means
    """
    data = lognormal_data(config.n, config.mu_true, config.tau, config.seed)
    grid = np.linspace(config.grid_low, config.grid_high, config.grid_points)
    mean, precision = lognormal_true_posterior(
        data, config.mu0, config.tau0, config.tau
    )
    true = gaussian_on_grid(grid, mean, precision)
    synthetic = synthetic_gaussian_posterior(
        data,
        grid,
        config.mu0,
        config.tau0,
        config.tau,
        config.epsilon,
        n_lik=config.n_lik,
        n_sets=config.n_sets,
        seed=config.seed,
    )
    summary = {
        "true_posterior_mean": mean,
        "true_posterior_precision": precision,
        "synthetic_posterior_mean": grid_mean(grid, synthetic),
    }
    return list(zip(grid, true, synthetic)), summary


def marginal_contrast(a: np.ndarray, b: np.ndarray) -> dict:
    """MMD between two 1-dimensional marginals, and between each and a shifted
    copy of the other. A sampler that adds no bias of its own gives a first
    value below the other two"""
    a = a[:, None]
    b = b[:, None]
    return {
        "mmd": mmd_poly3(a, b),
        "mmd_first_vs_shifted_second": mmd_poly3(a, b + MARGINAL_SHIFT),
        "mmd_second_vs_shifted_first": mmd_poly3(b, a + MARGINAL_SHIFT),
    }


def _autocorrelation(series: np.ndarray, max_lag: int) -> np.ndarray:
    try:
        return autocorrelation(series, min(max_lag, series.shape[0] - 1))
    except KernhmcDegenerateSeriesError:
        logger.warning("First coordinate of the chain never moved after burn-in")
        return np.full(min(max_lag, series.shape[0] - 1) + 1, np.nan)


def run_abc(config: AbcConfig, output_dir: ty.Union[str, Path]) -> dict:
    """Runs each configured sampler on the ABC posterior and writes

    * ``chain_<sampler>.csv`` and ``summary_<sampler>.json`` per chain
    * ``autocorrelation.csv``, autocorrelation of the first coordinate after
      burn-in, one column per sampler
    * ``histogram.csv``, the first coordinate's marginal density after burn-in
      on bins shared by all samplers
    * ``lognormal.csv``, the log-normal posterior table
    * ``report.json``, the summaries, the marginal contrast of the first two
      samplers and the log-normal posterior means
    """
    output_dir = prepare_output(output_dir, config)
    timings = Timings()
    observation = (
        ABCObservation.load(config.fixture) if config.fixture else ABCObservation.load()
    )
    if observation.theta_true.shape[0] != config.abc.theta_dim:
        raise KernhmcDimensionError(
            f"Observed data has dimension {observation.theta_true.shape[0]}, "
            f"expected {config.abc.theta_dim}"
        )
    target = make_abc_target(config.abc, observation.summary())
    marginals = {}
    summaries = {}
    for name in config.samplers:
        algorithm = Algorithm.parse(name)
        sampler = attrs.evolve(config.sampler, algorithm=algorithm)
        with timings.stage(str(algorithm)):
            chain = run_sampler(target, sampler)
        chain.to_csv(output_dir / f"chain_{algorithm}.csv")
        summaries[str(algorithm)] = chain.summary(sampler.burn_in)
        write_report(
            output_dir / f"summary_{algorithm}.json", summaries[str(algorithm)]
        )
        marginals[str(algorithm)] = chain.post_burn_in(sampler.burn_in)[:, 0]
    names = list(marginals)
    acfs = [_autocorrelation(marginals[n], config.max_lag) for n in names]
    n_lags = min(acf.shape[0] for acf in acfs)
    write_csv(
        output_dir / "autocorrelation.csv",
        ["lag"] + names,
        [[k] + [acf[k] for acf in acfs] for k in range(n_lags)],
    )
    pooled = np.concatenate(list(marginals.values()))
    edges = np.histogram_bin_edges(pooled, bins=config.bins)
    densities = [np.histogram(marginals[n], bins=edges, density=True)[0] for n in names]
    write_csv(
        output_dir / "histogram.csv",
        ["bin_low", "bin_high"] + names,
        [
            [edges[i], edges[i + 1]] + [density[i] for density in densities]
            for i in range(config.bins)
        ],
    )
    rows, lognormal = lognormal_table(config.lognormal)
    write_csv(output_dir / "lognormal.csv", ["mu", "true", "synthetic"], rows)
    report = {"summaries": summaries, "lognormal": lognormal}
    if len(names) >= 2:
        report["marginal_contrast"] = {
            "samplers": names[:2],
            **marginal_contrast(marginals[names[0]], marginals[names[1]]),
        }
    write_report(output_dir / "report.json", report)
    timings.save(output_dir)
    return report
