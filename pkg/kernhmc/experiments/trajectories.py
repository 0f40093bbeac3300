"""Trajectories of the exact Hamiltonian flow next to trajectories of the
surrogate's flow, from matched starting points and momenta"""
import logging
import typing as ty
from pathlib import Path
import numpy as np
from kernhmc.exceptions import KernhmcDivergenceError, KernhmcInputError
from kernhmc.core.dynamics import Trajectory, accept_prob, leapfrog
from kernhmc.core.enum import EstimatorKind
from kernhmc.core.estimators import finite_grad, fit_finite_batch
from kernhmc.core.features import sample_basis
from kernhmc.core.streams import make_rng
from .config import TrajectoriesConfig
from .fit import kernel_spec, resolve_hyperparameters
from .io import Timings, prepare_output, write_csv, write_report


logger = logging.getLogger("kernhmc")

TRAINING_STREAM = 0
START_STREAM = 1
MOMENTUM_STREAM = 2


def step_acceptances(trajectory: Trajectory) -> np.ndarray:
    """Acceptance probability of every recorded state of the trajectory were
    the integration stopped there"""
    H0 = trajectory.energies[0]
    return np.array([accept_prob(H0, H) for H in trajectory.energies])


def end_acceptance(trajectory: Trajectory) -> float:
    if trajectory.diverged:
        return 0.0
    return accept_prob(trajectory.energies[0], trajectory.energies[-1])


def run_trajectories(config: TrajectoriesConfig, output_dir: ty.Union[str, Path]):
    """Trains a finite surrogate on exact draws from the target, then integrates
    both flows from the same exact draws and momenta, evaluating every state
    under the true Hamiltonian. Writes

    * ``trajectories.csv``, per-step positions, momenta, energy and acceptance
      of both kinds of trajectory
    * ``endpoints.csv``, end-point acceptance of each pair of trajectories
    * ``report.json``, the mean end-point acceptances and hyper-parameters
    """
    target = config.target.build()
    if target.log_density is None or not target.has_gradient or target.sampler is None:
        raise KernhmcInputError(
            f"Target '{target.name}' needs an exact log-density, gradient and "
            "sampler to compare trajectories"
        )
    output_dir = prepare_output(output_dir, config)
    timings = Timings()

    def U(x):
        return -target.log_density(x)

    def grad_U(x):
        return -target.grad(x)

    train = target.sample(config.n_train, make_rng(config.seed, TRAINING_STREAM))
    with timings.stage("fit"):
        sigma, lambda_, cv = resolve_hyperparameters(
            train,
            config.sigma,
            config.lambda_,
            config.cv,
            EstimatorKind.finite,
            config.seed,
            config.m,
            family=config.family,
            rq_alpha=config.rq_alpha,
        )
        basis = sample_basis(
            kernel_spec(config.family, sigma, config.rq_alpha),
            config.m,
            target.dim,
            config.seed,
        )
        model = fit_finite_batch(train, basis, lambda_)

    def grad_U_kernel(x):
        return -finite_grad(model, x)

    starts = target.sample(config.n_trajectories, make_rng(config.seed, START_STREAM))
    momenta = make_rng(config.seed, MOMENTUM_STREAM).standard_normal(starts.shape)
    rows = []
    endpoints = []
    with timings.stage("integration"):
        for i, (q0, p0) in enumerate(zip(starts, momenta)):
            pair = {}
            for kind, grad in (("exact", grad_U), ("kernel", grad_U_kernel)):
                trajectory = leapfrog(grad, q0, p0, config.eps, config.L, U=U)
                if kind == "exact" and trajectory.diverged:
                    raise KernhmcDivergenceError(
                        f"Exact Hamiltonian flow diverged at step "
                        f"{trajectory.diverged_at} of trajectory {i}, reduce eps "
                        f"(currently {config.eps})"
                    )
                acceptances = step_acceptances(trajectory)
                for row, alpha in zip(trajectory.rows(), acceptances):
                    rows.append([i, kind] + row + [alpha])
                pair[kind] = end_acceptance(trajectory)
            endpoints.append([i, pair["exact"], pair["kernel"]])
    d = target.dim
    write_csv(
        output_dir / "trajectories.csv",
        ["trajectory", "kind", "step"]
        + [f"q{j + 1}" for j in range(d)]
        + [f"p{j + 1}" for j in range(d)]
        + ["H", "acceptance"],
        rows,
    )
    write_csv(
        output_dir / "endpoints.csv",
        ["trajectory", "exact_acceptance", "kernel_acceptance"],
        endpoints,
    )
    endpoints = np.array(endpoints)
    report = {
        "target": target.name,
        "sigma": sigma,
        "lambda": lambda_,
        "cross_validation": cv.to_dict() if cv is not None else None,
        "eps": config.eps,
        "L": config.L,
        "mean_exact_acceptance": float(endpoints[:, 1].mean()),
        "mean_kernel_acceptance": float(endpoints[:, 2].mean()),
    }
    write_report(output_dir / "report.json", report)
    timings.save(output_dir)
    logger.info(
        "Mean end-point acceptance: exact %g, kernel %g",
        report["mean_exact_acceptance"],
        report["mean_kernel_acceptance"],
    )
    return report
