"""Grid cross-validation of the kernel bandwidth and regulariser on the held-out
score matching objective"""
import itertools
import logging
import typing as ty
import attrs
import numpy as np
from kernhmc.exceptions import KernhmcGridError, KernhmcInputError, KernhmcNumericError
from kernhmc.core.enum import EstimatorKind, KernelFamily
from kernhmc.core.features import sample_basis
from kernhmc.core.kernels import KernelSpec
from kernhmc.core.streams import make_rng
from kernhmc.core.utils import as_matrix, check_finite
from .lite import fit_lite, fit_lite_lowrank
from .finite import fit_finite_batch


logger = logging.getLogger("kernhmc")


@attrs.define(frozen=True)
class CVResult:
    """Outcome of a cross-validation run

    Parameters
    ----------
    sigma : float
        selected bandwidth
    lambda_ : float
        selected regulariser
    fold_scores : np.ndarray
        mean held-out objective for every (sigma, lambda) pair, indexed
        [sigma_index, lambda_index]. Pairs whose fit failed score +inf
    sigma_grid : tuple
    lambda_grid : tuple
    """

    sigma: float = attrs.field(converter=float)
    lambda_: float = attrs.field(converter=float)
    fold_scores: np.ndarray = attrs.field(repr=False, eq=False)
    sigma_grid: ty.Tuple[float, ...] = attrs.field(converter=tuple)
    lambda_grid: ty.Tuple[float, ...] = attrs.field(converter=tuple)

    @property
    def best_score(self) -> float:
        i = self.sigma_grid.index(self.sigma)
        j = self.lambda_grid.index(self.lambda_)
        return float(self.fold_scores[i, j])

    def to_dict(self):
        return {
            "sigma": self.sigma,
            "lambda": self.lambda_,
            "sigma_grid": list(self.sigma_grid),
            "lambda_grid": list(self.lambda_grid),
            "fold_scores": [
                [s if np.isfinite(s) else None for s in row]
                for row in self.fold_scores.tolist()
            ],
        }


def log_grid(low: float, high: float, num: int) -> ty.List[float]:
    """Logarithmically spaced grid between `low` and `high` inclusive"""
    if not (0 < low <= high) or num < 1:
        raise KernhmcGridError(
            f"Invalid logarithmic grid [{low}, {high}] with {num} points"
        )
    return np.geomspace(low, high, num).tolist()


def fold_indices(n: int, folds: int, seed: int) -> ty.List[np.ndarray]:
    """Splits range(n) into `folds` near-equal folds after a seeded permutation"""
    if folds < 2:
        raise KernhmcInputError(
            f"Cross-validation needs at least 2 folds, found {folds}"
        )
    if n < folds:
        raise KernhmcInputError(
            f"Cannot split {n} points into {folds} non-empty folds"
        )
    perm = make_rng(seed, 0).permutation(n)
    return np.array_split(perm, folds)


def _fit(estimator, train, sigma, lambda_, m, seed, family, rq_alpha, lowrank_tol):
    if estimator is EstimatorKind.lite:
        if lowrank_tol is None:
            return fit_lite(train, sigma, lambda_)
        return fit_lite_lowrank(
            train, sigma, lambda_, tol=lowrank_tol, max_iters=10 * train.shape[0]
        )
    if family is KernelFamily.gaussian:
        spec = KernelSpec.gaussian(sigma)
    else:
        spec = KernelSpec.rational_quadratic(sigma, rq_alpha)
    # every bandwidth is evaluated with the same underlying random stream
    basis = sample_basis(spec, m, train.shape[1], seed)
    return fit_finite_batch(train, basis, lambda_)


def cross_validate(
    data,
    sigma_grid: ty.Sequence[float],
    lambda_grid: ty.Sequence[float],
    folds: int = 5,
    estimator: ty.Union[EstimatorKind, str] = EstimatorKind.lite,
    seed: int = 0,
    m: int = 100,
    family: ty.Union[KernelFamily, str] = KernelFamily.gaussian,
    rq_alpha: float = 1.0,
    lowrank_tol: ty.Optional[float] = None,
) -> CVResult:
    """Selects (sigma, lambda) by k-fold cross-validation of the score matching
    objective.

    For each grid pair the estimator is fitted on all-but-one fold and the
    objective of the fitted log-density is evaluated on the held-out fold; the
    pair with the smallest mean held-out objective is returned. Ties go to the
    larger lambda, then to the smaller sigma.

    Parameters
    ----------
    data : np.ndarray
        n x d samples
    sigma_grid : sequence of float
        candidate bandwidths
    lambda_grid : sequence of float
        candidate regularisers
    folds : int
        number of folds, at least 2
    estimator : EstimatorKind or str
        "lite" or "finite"
    seed : int
        seed of the fold permutation and of the random feature bases
    m : int
        number of random features (finite estimator only)
    family : KernelFamily or str
        kernel of the random features (finite estimator only, the lite
        estimator is Gaussian)
    rq_alpha : float
        shape of the rational-quadratic kernel
    lowrank_tol : float, optional
        when given the lite fits use the low-rank conjugate gradient path with
        this incomplete Cholesky tolerance
    """
    data = check_finite(as_matrix(data, name="data"), "cross-validation data")
    estimator = EstimatorKind.parse(estimator)
    family = KernelFamily.parse(family)
    sigma_grid = [float(s) for s in sigma_grid]
    lambda_grid = [float(lmbda) for lmbda in lambda_grid]
    if not sigma_grid or not lambda_grid:
        raise KernhmcGridError("Cross-validation grids must not be empty")
    if any(s <= 0 for s in sigma_grid) or any(lmbda <= 0 for lmbda in lambda_grid):
        raise KernhmcGridError("Cross-validation grid values must be positive")
    splits = fold_indices(data.shape[0], folds, seed)
    scores = np.zeros((len(sigma_grid), len(lambda_grid)))
    for (i, sigma), (j, lambda_) in itertools.product(
        enumerate(sigma_grid), enumerate(lambda_grid)
    ):
        fold_scores = []
        for k, held_out in enumerate(splits):
            train = np.delete(data, held_out, axis=0)
            try:
                model = _fit(
                    estimator,
                    train,
                    sigma,
                    lambda_,
                    m,
                    seed,
                    family,
                    rq_alpha,
                    lowrank_tol,
                )
                fold_scores.append(model.objective(data[held_out]))
            except KernhmcNumericError as e:
                logger.warning(
                    "Fit failed for sigma=%g, lambda=%g on fold %d: %s",
                    sigma,
                    lambda_,
                    k,
                    e,
                )
                fold_scores.append(np.inf)
        score = float(np.mean(fold_scores))
        scores[i, j] = score if np.isfinite(score) else np.inf
        logger.debug(
            "Cross-validation sigma=%g lambda=%g: %g", sigma, lambda_, scores[i, j]
        )
    if not np.any(np.isfinite(scores)):
        raise KernhmcNumericError("Every cross-validation fit failed")
    best = scores.min()
    candidates = [
        (-lambda_grid[j], sigma_grid[i], i, j)
        for i, j in zip(*np.nonzero(scores == best))
    ]
    _, _, i, j = min(candidates)
    logger.info(
        "Selected sigma=%g, lambda=%g (mean held-out objective %g)",
        sigma_grid[i],
        lambda_grid[j],
        best,
    )
    return CVResult(
        sigma=sigma_grid[i],
        lambda_=lambda_grid[j],
        fold_scores=scores,
        sigma_grid=sigma_grid,
        lambda_grid=lambda_grid,
    )
