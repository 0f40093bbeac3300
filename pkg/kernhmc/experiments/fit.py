"""Fitting a surrogate to a sample file and reporting on the fit"""
import logging
import typing as ty
from pathlib import Path
import numpy as np
from kernhmc.exceptions import KernhmcInputError
from kernhmc.core.enum import EstimatorKind, KernelFamily
from kernhmc.core.estimators import (
    cross_validate,
    fit_finite_batch,
    fit_lite,
    fit_lite_lowrank,
)
from kernhmc.core.features import sample_basis
from kernhmc.core.kernels import KernelSpec
from kernhmc.core.utils import fromdict
from .config import FitConfig, GridConfig, TargetConfig
from .io import Timings, prepare_output, read_samples_csv, write_csv, write_report


logger = logging.getLogger("kernhmc")


def kernel_spec(family: KernelFamily, sigma: float, rq_alpha: float) -> KernelSpec:
    if family is KernelFamily.gaussian:
        return KernelSpec.gaussian(sigma)
    return KernelSpec.rational_quadratic(sigma, rq_alpha)


def resolve_hyperparameters(
    data: np.ndarray,
    sigma,
    lambda_,
    grids: GridConfig,
    estimator: EstimatorKind,
    seed: int,
    m: int,
    family: KernelFamily = KernelFamily.gaussian,
    rq_alpha: float = 1.0,
    lowrank_tol: ty.Optional[float] = None,
):
    """Cross-validates whichever of sigma and lambda is set to "cv", holding the
    other at its configured value

    Returns
    -------
    sigma : float
    lambda_ : float
    cv : CVResult or None
        None if neither needed learning
    """
    if sigma != "cv" and lambda_ != "cv":
        return sigma, lambda_, None
    result = cross_validate(
        data,
        grids.sigma_grid if sigma == "cv" else [sigma],
        grids.lambda_grid if lambda_ == "cv" else [lambda_],
        folds=grids.folds,
        estimator=estimator,
        seed=seed,
        m=m,
        family=family,
        rq_alpha=rq_alpha,
        lowrank_tol=lowrank_tol,
    )
    return result.sigma, result.lambda_, result


def fit_model(data: np.ndarray, config: FitConfig, sigma: float, lambda_: float):
    if config.estimator is EstimatorKind.lite:
        if config.family is not KernelFamily.gaussian:
            raise KernhmcInputError(
                "The lite estimator is only defined for Gaussian kernels"
            )
        if config.lowrank_tol is None:
            return fit_lite(data, sigma, lambda_)
        return fit_lite_lowrank(
            data,
            sigma,
            lambda_,
            tol=config.lowrank_tol,
            max_iters=10 * data.shape[0],
        )
    basis = sample_basis(
        kernel_spec(config.family, sigma, config.rq_alpha),
        config.m,
        data.shape[1],
        config.seed,
    )
    return fit_finite_batch(data, basis, lambda_)


def gradient_errors(model, reference, points: np.ndarray):
    """Squared Euclidean errors of the model's gradient against the reference
    target's exact gradient at every point"""
    surrogate = model.grad(points)
    exact = np.array([reference.grad(x) for x in points])
    return surrogate, exact, ((surrogate - exact) ** 2).sum(axis=1)


def run_fit(config: FitConfig, output_dir: ty.Union[str, Path]) -> dict:
    """Fits the configured estimator to the input samples and writes

    * ``model.yaml``, the fitted model
    * ``report.json``, the hyper-parameters, the training objective, the
      cross-validation scores (if any) and the gradient error against the
      reference target (if any)
    * ``gradients.csv``, the surrogate and exact gradients on the evaluation
      grid, for 1-dimensional inputs with a reference target
    """
    output_dir = prepare_output(output_dir, config)
    timings = Timings()
    data = read_samples_csv(config.input)
    logger.info("Read %d samples of dimension %d", *data.shape)
    with timings.stage("cross_validation"):
        sigma, lambda_, cv = resolve_hyperparameters(
            data,
            config.sigma,
            config.lambda_,
            config.cv,
            config.estimator,
            config.seed,
            config.m,
            family=config.family,
            rq_alpha=config.rq_alpha,
            lowrank_tol=config.lowrank_tol,
        )
    with timings.stage("fit"):
        model = fit_model(data, config, sigma, lambda_)
    model.save(output_dir / "model.yaml")
    report = {
        "estimator": str(config.estimator),
        "n": data.shape[0],
        "d": data.shape[1],
        "sigma": sigma,
        "lambda": lambda_,
        "objective": model.objective(data),
        "cross_validation": cv.to_dict() if cv is not None else None,
    }
    if config.estimator is EstimatorKind.lite:
        report["converged"] = model.converged
        report["residual_norm"] = model.residual_norm
    if config.reference is not None:
        reference = fromdict(TargetConfig, config.reference).build()
        if reference.dim != data.shape[1]:
            raise KernhmcInputError(
                f"Reference target has dimension {reference.dim}, samples have "
                f"{data.shape[1]}"
            )
        if reference.dim == 1:
            points = np.linspace(
                config.grid_low, config.grid_high, config.grid_points
            )[:, None]
        else:
            points = data
        surrogate, exact, errors = gradient_errors(model, reference, points)
        report["gradient_mse"] = float(errors.mean())
        if reference.dim == 1:
            write_csv(
                output_dir / "gradients.csv",
                ["x", "surrogate", "exact"],
                zip(points[:, 0], surrogate[:, 0], exact[:, 0]),
            )
    write_report(output_dir / "report.json", report)
    timings.save(output_dir)
    logger.info(
        "Fitted %s estimator with sigma=%g, lambda=%g", config.estimator, sigma, lambda_
    )
    return report
