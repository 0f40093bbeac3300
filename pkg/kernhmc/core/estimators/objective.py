import typing as ty
import numpy as np
from kernhmc.exceptions import KernhmcInputError, KernhmcNonFiniteError
from kernhmc.core.utils import as_matrix


def score_objective(
    grad_f: ty.Callable[[np.ndarray], np.ndarray],
    lap_diag_f: ty.Callable[[np.ndarray, int], float],
    data,
) -> float:
    """Empirical score-matching objective of an unnormalised log-density f

        J(f) = 1/n sum_x sum_l [ d^2 f / dx_l^2 + 1/2 (d f / dx_l)^2 ]

    Parameters
    ----------
    grad_f : callable
        x -> gradient of f at x (d-vector)
    lap_diag_f : callable
        (x, l) -> second derivative of f along coordinate l at x
    data : np.ndarray
        n x d points the objective is averaged over

    Returns
    -------
    float
        the objective value
    """
    data = as_matrix(data, name="data")
    n, d = data.shape
    if n == 0:
        raise KernhmcInputError("Score objective needs at least one data point")
    total = 0.0
    for i, x in enumerate(data):
        grad = np.asarray(grad_f(x), dtype=float)
        curvature = np.array([lap_diag_f(x, ell) for ell in range(d)], dtype=float)
        if not (np.all(np.isfinite(grad)) and np.all(np.isfinite(curvature))):
            raise KernhmcNonFiniteError(
                i, f"Non-finite derivative of f at data point {i}: {x}"
            )
        total += curvature.sum() + 0.5 * grad @ grad
    return total / n


def batch_objective(gradients: np.ndarray, curvatures: np.ndarray) -> float:
    """Same objective as `score_objective` from precomputed n x d matrices of
    first and (diagonal) second derivatives, as the estimators evaluate them in
    vectorised form"""
    bad = ~(
        np.all(np.isfinite(gradients), axis=1) & np.all(np.isfinite(curvatures), axis=1)
    )
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise KernhmcNonFiniteError(
            i, f"Non-finite derivative of f at data point {i}"
        )
    return float(np.mean(curvatures.sum(axis=1) + 0.5 * (gradients**2).sum(axis=1)))
