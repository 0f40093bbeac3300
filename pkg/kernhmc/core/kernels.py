"""Translation-invariant kernels, their analytic gradients, Gram matrices and the
pivoted incomplete Cholesky factorisation used by the low-rank lite estimator"""
import logging
import attrs
import numpy as np
from scipy.spatial.distance import cdist
from kernhmc.exceptions import KernhmcDimensionError, KernhmcNumericError
from .enum import KernelFamily
from .utils import as_matrix, as_vector


logger = logging.getLogger("kernhmc")


def _positive(instance, attribute, value):
    if not value > 0:
        raise ValueError(f"'{attribute.name}' must be positive, found {value}")


@attrs.define(frozen=True)
class KernelSpec:
    """A Gaussian or rational-quadratic kernel

    Gaussian: k(x, y) = exp(-|x - y|^2 / sigma)
    Rational quadratic: k(x, y) = (1 + |x - y|^2 / (alpha * sigma))^(-alpha),
    which tends to the Gaussian kernel with the same sigma as alpha -> inf

    Parameters
    ----------
    family : KernelFamily
        the kernel family
    sigma : float
        the bandwidth parameter (divides the squared distance)
    alpha : float
        shape of the rational-quadratic kernel, unused by the Gaussian
    """

    family: KernelFamily = attrs.field(
        default=KernelFamily.gaussian, converter=KernelFamily.parse
    )
    sigma: float = attrs.field(default=1.0, converter=float, validator=_positive)
    alpha: float = attrs.field(default=1.0, converter=float, validator=_positive)

    @classmethod
    def gaussian(cls, sigma):
        return cls(KernelFamily.gaussian, sigma)

    @classmethod
    def rational_quadratic(cls, sigma, alpha):
        return cls(KernelFamily.rational_quadratic, sigma, alpha)

    def profile(self, sq_dists):
        """Kernel values as a function of the squared distances"""
        if self.family is KernelFamily.gaussian:
            return np.exp(-sq_dists / self.sigma)
        return (1.0 + sq_dists / (self.alpha * self.sigma)) ** (-self.alpha)

    def profile_derivative(self, sq_dists):
        """Derivative of `profile` with respect to the squared distance"""
        if self.family is KernelFamily.gaussian:
            return -np.exp(-sq_dists / self.sigma) / self.sigma
        base = 1.0 + sq_dists / (self.alpha * self.sigma)
        return -(base ** (-self.alpha - 1.0)) / self.sigma

    def to_dict(self):
        return {"family": str(self.family), "sigma": self.sigma, "alpha": self.alpha}

    @classmethod
    def from_dict(cls, dct):
        return cls(dct["family"], dct["sigma"], dct.get("alpha", 1.0))


@attrs.define(frozen=True)
class LowRankFactor:
    """Low-rank factor L of a Gram matrix, K ~= L L^T

    Parameters
    ----------
    L : np.ndarray
        n x rank factor
    tol : float
        the cut-off on the largest remaining residual diagonal
    residual : float
        the largest remaining residual diagonal when the factorisation stopped,
        which bounds every entry of K - L L^T in absolute value
    pivots : np.ndarray
        indices of the points chosen as pivots, in order
    """

    L: np.ndarray = attrs.field(repr=False)
    tol: float = attrs.field()
    residual: float = attrs.field()
    pivots: np.ndarray = attrs.field(repr=False)

    @property
    def rank(self):
        return self.L.shape[1]

    def matvec(self, v):
        return self.L @ (self.L.T @ v)


def _pair(x, y):
    x = as_vector(x, name="x")
    y = as_vector(y, name="y")
    if x.shape != y.shape:
        raise KernhmcDimensionError(
            f"Kernel arguments have mismatching dimensions {x.shape[0]} "
            f"and {y.shape[0]}"
        )
    return x, y


def kernel_eval(spec: KernelSpec, x, y) -> float:
    x, y = _pair(x, y)
    diff = x - y
    return float(spec.profile(diff @ diff))


def kernel_grad_x(spec: KernelSpec, x, y) -> np.ndarray:
    """Gradient of k(x, y) with respect to x"""
    x, y = _pair(x, y)
    diff = x - y
    return 2.0 * spec.profile_derivative(diff @ diff) * diff


def kernel_matrix(spec: KernelSpec, X, Z=None) -> np.ndarray:
    """Gram matrix between the rows of X and the rows of Z (Z defaults to X)"""
    X = as_matrix(X, name="X")
    Z = X if Z is None else as_matrix(Z, name="Z")
    if X.shape[1] != Z.shape[1]:
        raise KernhmcDimensionError(
            f"Point sets have mismatching dimensions {X.shape[1]} and {Z.shape[1]}"
        )
    return spec.profile(cdist(X, Z, "sqeuclidean"))


def incomplete_cholesky(
    spec: KernelSpec, X, tol: float, max_rank=None
) -> LowRankFactor:
    """Pivoted incomplete Cholesky factorisation of the Gram matrix of X, choosing
    the point with the largest remaining residual diagonal at each step.

    As the residual K - L L^T is positive semi-definite, its off-diagonal entries
    are bounded by its largest diagonal, so stopping when every residual diagonal
    is <= tol bounds every entry.

    Parameters
    ----------
    spec : KernelSpec
        the kernel
    X : np.ndarray
        n x d points
    tol : float
        cut-off on the residual diagonal
    max_rank : int, optional
        upper bound on the number of columns, defaults to n

    Returns
    -------
    LowRankFactor
        the factor, its pivots and the achieved residual bound
    """
    if not tol > 0:
        raise ValueError(f"Incomplete Cholesky tolerance must be positive, found {tol}")
    X = as_matrix(X)
    n = X.shape[0]
    max_rank = n if max_rank is None else min(int(max_rank), n)
    diag = spec.profile(np.zeros(n))
    L = np.zeros((n, max_rank))
    pivots = []
    for j in range(max_rank):
        i = int(np.argmax(diag))
        if diag[i] <= tol:
            break
        column = spec.profile(cdist(X, X[i : i + 1], "sqeuclidean")[:, 0])
        if not np.all(np.isfinite(column)):
            raise KernhmcNumericError(
                f"Non-finite kernel values in column {i} of the Gram matrix"
            )
        column = (column - L[:, :j] @ L[i, :j]) / np.sqrt(diag[i])
        L[:, j] = column
        diag = np.maximum(diag - column**2, 0.0)
        diag[i] = 0.0
        pivots.append(i)
    rank = len(pivots)
    residual = float(diag.max()) if n else 0.0
    logger.debug(
        "Incomplete Cholesky of %d points reached rank %d (residual %g)",
        n,
        rank,
        residual,
    )
    return LowRankFactor(
        L=L[:, :rank].copy(), tol=float(tol), residual=residual, pivots=np.array(pivots)
    )
