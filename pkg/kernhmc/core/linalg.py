"""Linear-algebra kernels the estimators rely on: matrix-free conjugate gradient
and rank-one Cholesky up-dates"""
import typing as ty
import attrs
import numpy as np


@attrs.define
class CGResult:
    """Outcome of a conjugate gradient solve

    Parameters
    ----------
    x : np.ndarray
        the best iterate found (smallest residual norm)
    residual_norm : float
        |b - A x| for the returned iterate
    iterations : int
        number of iterations performed
    converged : bool
        whether the residual norm fell below the requested tolerance
    """

    x: np.ndarray = attrs.field(repr=False)
    residual_norm: float = attrs.field()
    iterations: int = attrs.field()
    converged: bool = attrs.field()


def conjugate_gradient(
    matvec: ty.Callable[[np.ndarray], np.ndarray],
    rhs: np.ndarray,
    x0: ty.Optional[np.ndarray] = None,
    tol: float = 1e-10,
    max_iters: int = 1000,
) -> CGResult:
    """Solves A x = rhs for symmetric positive definite A given only A's
    matrix-vector product.

    Parameters
    ----------
    matvec : callable
        v -> A v
    rhs : np.ndarray
        right-hand side
    x0 : np.ndarray, optional
        initial iterate ("hot start"), zeros by default
    tol : float
        stop when |rhs - A x| <= tol * max(|rhs|, 1)
    max_iters : int
        iteration budget

    Returns
    -------
    CGResult
        best iterate, its residual norm and whether it converged
    """
    rhs = np.asarray(rhs, dtype=float)
    threshold = tol * max(np.linalg.norm(rhs), 1.0)
    if x0 is None:
        x = np.zeros_like(rhs)
        r = rhs.copy()
    else:
        x = np.array(x0, dtype=float)
        r = rhs - matvec(x)
    r_norm_sq = r @ r
    best_x, best_norm = x.copy(), np.sqrt(r_norm_sq)
    if best_norm <= threshold:
        return CGResult(best_x, float(best_norm), 0, True)
    p = r.copy()
    iterations = 0
    for iterations in range(1, max_iters + 1):
        Ap = matvec(p)
        curvature = p @ Ap
        if not curvature > 0:
            # Breakdown (A singular along p), keep the best iterate so far
            break
        step = r_norm_sq / curvature
        x = x + step * p
        r = r - step * Ap
        new_norm_sq = r @ r
        norm = np.sqrt(new_norm_sq)
        if norm < best_norm:
            best_x, best_norm = x.copy(), norm
        if norm <= threshold:
            break
        p = r + (new_norm_sq / r_norm_sq) * p
        r_norm_sq = new_norm_sq
    # Recurrence residuals drift, so report the true residual of the best iterate
    true_norm = float(np.linalg.norm(rhs - matvec(best_x))) if iterations else best_norm
    return CGResult(best_x, float(true_norm), iterations, bool(true_norm <= threshold))


def cholesky_rank_one_update(L: np.ndarray, x: np.ndarray) -> bool:
    """Updates the lower-triangular factor L of A in-place so that it becomes the
    factor of A + x x^T. Costs O(m^2).

    Returns False (leaving L partially updated) if a non-finite or non-positive
    diagonal is produced, in which case the caller must rebuild the factor"""
    x = np.array(x, dtype=float)
    m = L.shape[0]
    for k in range(m):
        Lkk = L[k, k]
        r = np.sqrt(Lkk * Lkk + x[k] * x[k])
        if not (np.isfinite(r) and r > 0 and Lkk > 0):
            return False
        c = r / Lkk
        s = x[k] / Lkk
        L[k, k] = r
        if k + 1 < m:
            L[k + 1 :, k] = (L[k + 1 :, k] + s * x[k + 1 :]) / c
            x[k + 1 :] = c * x[k + 1 :] - s * L[k + 1 :, k]
    return True
