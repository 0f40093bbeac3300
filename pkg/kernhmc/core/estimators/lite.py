"""The "lite" kernel exponential family estimator: f(x) = sum_i alpha_i k(z_i, x)
over a sub-sample z of the chain history, fitted by regularised score matching
with either a dense solve or an incomplete-Cholesky/conjugate-gradient path"""
import logging
import typing as ty
from pathlib import Path
import attrs
import numpy as np
import scipy.linalg
from kernhmc.exceptions import KernhmcInputError, KernhmcNumericError
from kernhmc.core.enum import KernelFamily
from kernhmc.core.kernels import KernelSpec, incomplete_cholesky, kernel_matrix
from kernhmc.core.linalg import conjugate_gradient
from kernhmc.core.utils import (
    FORMAT_VERSION,
    as_matrix,
    as_vector,
    check_finite,
    check_format_version,
    load_yaml,
    save_yaml,
)
from .objective import batch_objective


logger = logging.getLogger("kernhmc")


@attrs.define(frozen=True, eq=False)
class LiteModel:
    """Fitted lite estimator

    Parameters
    ----------
    Z : np.ndarray
        n x d basis points
    alpha : np.ndarray
        n dual coefficients
    spec : KernelSpec
        the (Gaussian) kernel
    lambda_ : float
        the regulariser the coefficients were fitted with
    converged : bool
        False if an iterative solve stopped before reaching its tolerance
    residual_norm : float
        residual norm of the linear solve (0 for dense solves)
    """

    Z: np.ndarray = attrs.field(repr=False, converter=as_matrix)
    alpha: np.ndarray = attrs.field(repr=False, converter=as_vector)
    spec: KernelSpec = attrs.field()
    lambda_: float = attrs.field(converter=float)
    converged: bool = attrs.field(default=True)
    residual_norm: float = attrs.field(default=0.0)

    @property
    def n(self):
        return self.Z.shape[0]

    @property
    def d(self):
        return self.Z.shape[1]

    @classmethod
    def zero(cls, Z, sigma, lambda_=1.0):
        Z = as_matrix(Z)
        return cls(Z, np.zeros(Z.shape[0]), KernelSpec.gaussian(sigma), lambda_)

    def _weights(self, X):
        X = as_matrix(X, dim=self.d)
        return X, kernel_matrix(self.spec, X, self.Z) * self.alpha

    def log_density(self, X) -> np.ndarray:
        X, W = self._weights(X)
        return W.sum(axis=1)

    def grad(self, X) -> np.ndarray:
        """Gradients of f at every row of X (n x d)"""
        X, W = self._weights(X)
        return -(2.0 / self.spec.sigma) * (X * W.sum(axis=1)[:, None] - W @ self.Z)

    def laplacian_diag(self, X) -> np.ndarray:
        """Second derivatives d^2 f / dx_l^2 at every row of X (n x d)"""
        X, W = self._weights(X)
        sigma = self.spec.sigma
        w = W.sum(axis=1)[:, None]
        sq = X**2 * w - 2 * X * (W @ self.Z) + W @ self.Z**2
        return (4.0 / sigma**2) * sq - (2.0 / sigma) * w

    def objective(self, X) -> float:
        return batch_objective(self.grad(X), self.laplacian_diag(X))

    def to_dict(self):
        return {
            "format_version": FORMAT_VERSION,
            "kind": "lite",
            "spec": self.spec.to_dict(),
            "lambda": self.lambda_,
            "Z": self.Z.tolist(),
            "alpha": self.alpha.tolist(),
        }

    @classmethod
    def from_dict(cls, dct):
        check_format_version(dct, "lite model")
        return cls(
            Z=np.array(dct["Z"], dtype=float),
            alpha=np.array(dct["alpha"], dtype=float),
            spec=KernelSpec.from_dict(dct["spec"]),
            lambda_=dct["lambda"],
        )

    def save(self, path: ty.Union[str, Path]):
        save_yaml(self.to_dict(), path)

    @classmethod
    def load(cls, path: ty.Union[str, Path]):
        return cls.from_dict(load_yaml(path))


def lite_grad(model: LiteModel, x) -> np.ndarray:
    return model.grad(as_vector(x, dim=model.d))[0]


def lite_log_density(model: LiteModel, x) -> float:
    """Unnormalised log-density f(x) of the model"""
    return float(model.log_density(as_vector(x, dim=model.d))[0])


def _check_params(Z, sigma, lambda_):
    Z = check_finite(as_matrix(Z, name="Z"), "basis points")
    if Z.shape[0] < 1:
        raise KernhmcInputError("Lite estimator needs at least one basis point")
    if not sigma > 0:
        raise KernhmcInputError(f"Kernel bandwidth must be positive, found {sigma}")
    if not lambda_ > 0:
        raise KernhmcInputError(f"Regulariser must be positive, found {lambda_}")
    return Z, KernelSpec.gaussian(sigma)


def lite_system_terms(Z: np.ndarray, spec: KernelSpec):
    """The vector b and matrix C of the lite estimator's linear system, built
    from the dense Gram matrix of Z"""
    if spec.family is not KernelFamily.gaussian:
        raise KernhmcInputError(
            "The lite estimator is only defined for Gaussian kernels"
        )
    n, d = Z.shape
    K = kernel_matrix(spec, Z)
    K1 = K.sum(axis=1)
    b = np.zeros(n)
    C = np.zeros((n, n))
    for ell in range(d):
        x = Z[:, ell]
        s = x * x
        b += (2.0 / spec.sigma) * (K @ s + s * K1 - 2 * x * (K @ x)) - K1
        A = x[:, None] * K - K * x[None, :]
        C += A.T @ A
    return b, C


def fit_lite(Z, sigma: float, lambda_: float) -> LiteModel:
    """Fits the lite estimator by solving (C + lambda I) alpha = -(sigma / 2) b
    densely. Costs O(d n^3) time and O(n^2) memory

    Parameters
    ----------
    Z : np.ndarray
        n x d basis points (sub-sample of the chain history)
    sigma : float
        Gaussian kernel bandwidth
    lambda_ : float
        regulariser, must be positive
    """
    Z, spec = _check_params(Z, sigma, lambda_)
    b, C = lite_system_terms(Z, spec)
    if not (np.all(np.isfinite(b)) and np.all(np.isfinite(C))):
        raise KernhmcNumericError("Non-finite entries in the lite estimator's system")
    system = C + lambda_ * np.eye(Z.shape[0])
    try:
        factor = scipy.linalg.cho_factor(system, lower=True)
    except np.linalg.LinAlgError as e:
        raise KernhmcNumericError(
            f"Lite estimator system is not positive definite: {e}"
        )
    alpha = scipy.linalg.cho_solve(factor, -(sigma / 2.0) * b)
    return LiteModel(Z, alpha, spec, lambda_)


def fit_lite_lowrank(
    Z,
    sigma: float,
    lambda_: float,
    tol: float,
    max_iters: int,
    cg_tol: float = 1e-12,
    alpha0: ty.Optional[np.ndarray] = None,
) -> LiteModel:
    """Fits the lite estimator without forming K or C, using the low-rank factor
    K ~= L L^T from incomplete Cholesky so that b and every product with C cost
    O(n l), and solving the system with conjugate gradient.

    Parameters
    ----------
    Z : np.ndarray
        n x d basis points
    sigma : float
        Gaussian kernel bandwidth
    lambda_ : float
        regulariser, must be positive
    tol : float
        incomplete Cholesky cut-off on the residual diagonal
    max_iters : int
        conjugate gradient iteration budget
    cg_tol : float
        relative residual at which conjugate gradient stops
    alpha0 : np.ndarray, optional
        initial iterate, e.g. the coefficients of a previous fit ("hot start")

    Returns
    -------
    LiteModel
        the model; `converged` is False and `residual_norm` reports the residual
        if CG ran out of iterations
    """
    Z, spec = _check_params(Z, sigma, lambda_)
    if not tol > 0:
        raise KernhmcInputError(f"Low-rank tolerance must be positive, found {tol}")
    factor = incomplete_cholesky(spec, Z, tol)
    K = factor.matvec
    n, d = Z.shape
    K1 = K(np.ones(n))
    b = np.zeros(n)
    for ell in range(d):
        x = Z[:, ell]
        s = x * x
        b += (2.0 / sigma) * (K(s) + s * K1 - 2 * x * K(x)) - K1

    def system_matvec(v):
        out = lambda_ * v
        for ell in range(d):
            x = Z[:, ell]
            Av = x * K(v) - K(x * v)
            out = out + K(x * Av) - x * K(Av)
        return out

    if alpha0 is not None and np.shape(alpha0) != (n,):
        alpha0 = None
    result = conjugate_gradient(
        system_matvec, -(sigma / 2.0) * b, x0=alpha0, tol=cg_tol, max_iters=max_iters
    )
    if not result.converged:
        logger.warning(
            "Conjugate gradient did not converge within %d iterations "
            "(residual norm %g)",
            max_iters,
            result.residual_norm,
        )
    return LiteModel(
        Z,
        result.x,
        spec,
        lambda_,
        converged=result.converged,
        residual_norm=result.residual_norm,
    )
