"""The "finite" estimator: f(x) = theta^T phi(x) in a random Fourier feature space,
fitted by regularised score matching over all points seen so far, with O(d m^2)
online updates through rank-one Cholesky up-dates.

Regularisation acts on the summed system

    (sum_i sum_l phi'_l(x_i) phi'_l(x_i)^T + lambda I) theta = -sum_i sum_l phi''_l(x_i)

i.e. theta = (C + (lambda / t) I)^-1 b with C, b the averages over the t absorbed
points, so that the running Cholesky factor can start from sqrt(lambda) I and be
updated by rank-one terms only."""
import logging
import typing as ty
from pathlib import Path
import attrs
import numpy as np
import scipy.linalg
from kernhmc.exceptions import KernhmcInputError, KernhmcNumericError
from kernhmc.core.features import FeatureBasis, feature_jacobian, phi
from kernhmc.core.linalg import cholesky_rank_one_update
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
class FiniteModel:
    """Fitted finite estimator together with the running sums needed to absorb
    further points

    Parameters
    ----------
    basis : FeatureBasis
        the random feature basis
    theta : np.ndarray
        m primal weights
    b_sum : np.ndarray
        running sum of -sum_l phi''_l over absorbed points
    C_sum : np.ndarray
        running sum of sum_l phi'_l phi'_l^T over absorbed points (m x m)
    C_chol : np.ndarray
        lower Cholesky factor of C_sum + lambda I
    t : int
        number of absorbed points
    lambda_ : float
        regulariser
    rebuilds : int
        number of times the factor had to be rebuilt from C_sum because a
        rank-one up-date lost positive definiteness
    """

    basis: FeatureBasis = attrs.field()
    theta: np.ndarray = attrs.field(repr=False)
    b_sum: np.ndarray = attrs.field(repr=False)
    C_sum: np.ndarray = attrs.field(repr=False)
    C_chol: np.ndarray = attrs.field(repr=False)
    t: int = attrs.field()
    lambda_: float = attrs.field(converter=float)
    rebuilds: int = attrs.field(default=0)

    @property
    def m(self):
        return self.basis.m

    @property
    def d(self):
        return self.basis.d

    @classmethod
    def initial(cls, basis: FeatureBasis, lambda_: float):
        """The empty model (no points absorbed, theta = 0)"""
        if not lambda_ > 0:
            raise KernhmcInputError(f"Regulariser must be positive, found {lambda_}")
        m = basis.m
        return cls(
            basis=basis,
            theta=np.zeros(m),
            b_sum=np.zeros(m),
            C_sum=np.zeros((m, m)),
            C_chol=np.sqrt(lambda_) * np.eye(m),
            t=0,
            lambda_=lambda_,
        )

    def log_density(self, X) -> np.ndarray:
        return self.basis.transform(X) @ self.theta

    def grad(self, X) -> np.ndarray:
        """Gradients of f at every row of X (n x d)"""
        phases = self.basis.phases(X)
        return (-self.basis.scale * np.sin(phases) * self.theta) @ self.basis.omegas

    def laplacian_diag(self, X) -> np.ndarray:
        phases = self.basis.phases(X)
        return (-self.basis.scale * np.cos(phases) * self.theta) @ self.basis.omegas**2

    def objective(self, X) -> float:
        return batch_objective(self.grad(X), self.laplacian_diag(X))

    def to_dict(self):
        return {
            "format_version": FORMAT_VERSION,
            "kind": "finite",
            "basis": self.basis.to_dict(),
            "lambda": self.lambda_,
            "t": self.t,
            "theta": self.theta.tolist(),
            "b_sum": self.b_sum.tolist(),
            "C_sum": self.C_sum.tolist(),
            "C_chol": self.C_chol.tolist(),
        }

    @classmethod
    def from_dict(cls, dct):
        check_format_version(dct, "finite model")
        return cls(
            basis=FeatureBasis.from_dict(dct["basis"]),
            theta=np.array(dct["theta"], dtype=float),
            b_sum=np.array(dct["b_sum"], dtype=float),
            C_sum=np.array(dct["C_sum"], dtype=float),
            C_chol=np.array(dct["C_chol"], dtype=float),
            t=int(dct["t"]),
            lambda_=dct["lambda"],
        )

    def save(self, path: ty.Union[str, Path]):
        save_yaml(self.to_dict(), path)

    @classmethod
    def load(cls, path: ty.Union[str, Path]):
        return cls.from_dict(load_yaml(path))


def finite_system_terms(X: np.ndarray, basis: FeatureBasis):
    """Sums over the rows of X of -sum_l phi''_l (m-vector) and of
    sum_l phi'_l phi'_l^T (m x m)"""
    phases = basis.phases(X)
    sq_norms = (basis.omegas**2).sum(axis=1)
    b_sum = basis.scale * np.cos(phases).sum(axis=0) * sq_norms
    S = np.sin(phases)
    C_sum = basis.scale**2 * (S.T @ S) * (basis.omegas @ basis.omegas.T)
    return b_sum, C_sum


def _solve(C_chol, b_sum):
    y = scipy.linalg.solve_triangular(C_chol, b_sum, lower=True)
    return scipy.linalg.solve_triangular(C_chol, y, lower=True, trans="T")


def _factorise(C_sum, lambda_):
    try:
        return np.linalg.cholesky(C_sum + lambda_ * np.eye(C_sum.shape[0]))
    except np.linalg.LinAlgError as e:
        raise KernhmcNumericError(
            f"Finite estimator system is not positive definite: {e}"
        )


def fit_finite_batch(X, basis: FeatureBasis, lambda_: float) -> FiniteModel:
    """Fits the finite estimator on all rows of X at once. Costs O(t m^2 + m^3)

    Parameters
    ----------
    X : np.ndarray
        t x d points
    basis : FeatureBasis
        the random feature basis
    lambda_ : float
        regulariser of the summed system, must be positive
    """
    X = check_finite(as_matrix(X, dim=basis.d), "data points")
    if X.shape[0] < 1:
        raise KernhmcInputError("Finite estimator needs at least one data point")
    if not lambda_ > 0:
        raise KernhmcInputError(f"Regulariser must be positive, found {lambda_}")
    b_sum, C_sum = finite_system_terms(X, basis)
    check_finite(b_sum, "feature derivatives")
    C_chol = _factorise(C_sum, lambda_)
    return FiniteModel(
        basis=basis,
        theta=_solve(C_chol, b_sum),
        b_sum=b_sum,
        C_sum=C_sum,
        C_chol=C_chol,
        t=X.shape[0],
        lambda_=lambda_,
    )


def finite_update(model: FiniteModel, x_new) -> FiniteModel:
    """Absorbs one point with d rank-one Cholesky up-dates and two triangular
    solves, costing O(d m^2) regardless of how many points were absorbed before.
    If an up-date loses positive definiteness the factor is rebuilt from the
    running sum in O(m^3) and the event is counted in `rebuilds`"""
    x_new = check_finite(as_vector(x_new, dim=model.d, name="x_new"), "new point")
    J = feature_jacobian(model.basis, x_new)
    b_sum = model.b_sum + phi(model.basis, x_new) * (model.basis.omegas**2).sum(axis=1)
    C_sum = model.C_sum + J.T @ J
    C_chol = model.C_chol.copy()
    rebuilds = model.rebuilds
    if not all(cholesky_rank_one_update(C_chol, row) for row in J):
        logger.warning(
            "Rank-one Cholesky up-date lost positive definiteness after %d points, "
            "rebuilding the factor",
            model.t,
        )
        C_chol = _factorise(C_sum, model.lambda_)
        rebuilds += 1
    return FiniteModel(
        basis=model.basis,
        theta=_solve(C_chol, b_sum),
        b_sum=b_sum,
        C_sum=C_sum,
        C_chol=C_chol,
        t=model.t + 1,
        lambda_=model.lambda_,
        rebuilds=rebuilds,
    )


def finite_absorb(model: FiniteModel, X, rank_one_limit=None) -> FiniteModel:
    """Absorbs several points at once. Small batches go through `finite_update`;
    once the number of rank-one terms exceeds `rank_one_limit` (default m / 50)
    a single refactorisation of the updated sum is cheaper"""
    X = check_finite(as_matrix(X, dim=model.d), "new points")
    if X.shape[0] == 0:
        return model
    if rank_one_limit is None:
        rank_one_limit = max(1, model.m // 50)
    if X.shape[0] * model.d <= rank_one_limit:
        for x in X:
            model = finite_update(model, x)
        return model
    b_new, C_new = finite_system_terms(X, model.basis)
    b_sum = model.b_sum + b_new
    C_sum = model.C_sum + C_new
    C_chol = _factorise(C_sum, model.lambda_)
    return attrs.evolve(
        model,
        theta=_solve(C_chol, b_sum),
        b_sum=b_sum,
        C_sum=C_sum,
        C_chol=C_chol,
        t=model.t + X.shape[0],
    )


def finite_grad(model: FiniteModel, x) -> np.ndarray:
    """Gradient [d phi / dx]^T theta at x, costing O(m d)"""
    return feature_jacobian(model.basis, as_vector(x, dim=model.d)) @ model.theta
