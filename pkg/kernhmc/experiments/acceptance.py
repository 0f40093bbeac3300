"""Hypothetical acceptance of trajectories driven by the finite surrogate, as a
function of dimension and training size, on Gaussian targets. No chain is run:
trajectories start from exact draws and their end-points are scored with the
true Hamiltonian, which isolates the quality of the surrogate's gradient"""
import itertools
import logging
import typing as ty
from pathlib import Path
import numpy as np
from kernhmc.core.dynamics import kernel_induced_proposal
from kernhmc.core.enum import EstimatorKind
from kernhmc.core.estimators import finite_grad, fit_finite_batch
from kernhmc.core.features import sample_basis
from kernhmc.core.streams import make_rng
from kernhmc.targets import make_isotropic_gaussian, make_rotated_gamma_gaussian
from .config import AcceptanceBenchmarkConfig
from .fit import kernel_spec, resolve_hyperparameters
from .io import Timings, map_trials, prepare_output, write_csv, write_report


logger = logging.getLogger("kernhmc")

TRAINING_STREAM = 0
START_STREAM = 1
PROPOSAL_STREAM = 2
TARGET_STREAM = 3


def benchmark_target(config: AcceptanceBenchmarkConfig, d: int, trial: int):
    if config.target == "isotropic_gaussian":
        return make_isotropic_gaussian(d)
    # each trial draws its own eigenvalues and orientation
    seed = int(make_rng(config.seed, d, trial, TARGET_STREAM).integers(2**31))
    return make_rotated_gamma_gaussian(d, seed)


def acceptance_trial(
    config: AcceptanceBenchmarkConfig, d: int, n: int, trial: int
) -> ty.Tuple[float, float, float]:
    """One cell of the heatmap: fits a surrogate with m = n features on n exact
    draws and returns the mean hypothetical acceptance of its trajectories along
    with the hyper-parameters used

    When cross-validated, hyper-parameters are selected on at most
    `config.cv_points` of the draws with as many features, and the selected
    regulariser is rescaled by n / (number of points it was selected on) so
    that the regularisation per absorbed point is preserved.
    """
    target = benchmark_target(config, d, trial)
    train = target.sample(n, make_rng(config.seed, d, n, trial, TRAINING_STREAM))
    n_cv = min(n, config.cv_points)
    sigma, lambda_, _ = resolve_hyperparameters(
        train[:n_cv],
        config.sigma,
        config.lambda_,
        config.cv,
        EstimatorKind.finite,
        config.seed + trial,
        n_cv,
        family=config.family,
        rq_alpha=config.rq_alpha,
    )
    if config.lambda_ == "cv":
        lambda_ *= n / n_cv
    basis = sample_basis(
        kernel_spec(config.family, sigma, config.rq_alpha), n, d, config.seed + trial
    )
    model = fit_finite_batch(train, basis, lambda_)

    def U(x):
        return -target.log_density(x)

    starts = target.sample(
        config.n_trajectories, make_rng(config.seed, d, n, trial, START_STREAM)
    )
    rng = make_rng(config.seed, d, n, trial, PROPOSAL_STREAM)
    acceptances = [
        kernel_induced_proposal(
            lambda x: finite_grad(model, x), q, config.hamiltonian, rng
        ).acceptance(U)
        for q in starts
    ]
    mean = float(np.mean(acceptances))
    logger.info(
        "Acceptance benchmark d=%d n=m=%d trial %d: %g", d, n, trial, mean
    )
    return mean, sigma, lambda_


def run_acceptance_benchmark(
    config: AcceptanceBenchmarkConfig, output_dir: ty.Union[str, Path]
) -> dict:
    """Evaluates every (d, n = m, trial) cell, spreading cells over
    `config.workers` processes, and writes

    * ``acceptance.csv``, one row per cell
    * ``heatmap.csv``, mean and standard deviation over trials per (d, n)
    * ``report.json``, the heatmap as nested lists indexed [d][n]
    """
    output_dir = prepare_output(output_dir, config)
    timings = Timings()
    cells = list(itertools.product(config.dims, config.sizes, range(config.trials)))
    with timings.stage("trials"):
        results = map_trials(
            acceptance_trial,
            [(config, d, n, trial) for d, n, trial in cells],
            workers=config.workers,
        )
    write_csv(
        output_dir / "acceptance.csv",
        ["d", "n", "trial", "mean_acceptance", "sigma", "lambda"],
        [list(cell) + list(result) for cell, result in zip(cells, results)],
    )
    means = np.array([r[0] for r in results]).reshape(
        len(config.dims), len(config.sizes), config.trials
    )
    heatmap = means.mean(axis=2)
    spread = means.std(axis=2)
    write_csv(
        output_dir / "heatmap.csv",
        ["d", "n", "mean_acceptance", "sd_acceptance"],
        [
            [d, n, heatmap[i, j], spread[i, j]]
            for (i, d), (j, n) in itertools.product(
                enumerate(config.dims), enumerate(config.sizes)
            )
        ],
    )
    report = {
        "target": config.target,
        "dims": config.dims,
        "sizes": config.sizes,
        "trials": config.trials,
        "mean_acceptance": heatmap,
        "sd_acceptance": spread,
    }
    write_report(output_dir / "report.json", report)
    timings.save(output_dir)
    return report
