"""Gaussian benchmark targets: the isotropic Gaussian and the Gaussian with
Gamma(1, 1) distributed eigenvalues under a random rotation"""
import numpy as np
import scipy.linalg
from kernhmc.exceptions import KernhmcInputError
from kernhmc.core.streams import make_rng
from kernhmc.core.target import Target
from kernhmc.core.utils import as_matrix, as_vector


def random_rotation(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed orthogonal matrix from the QR decomposition of a Gaussian
    matrix, with the signs of R's diagonal absorbed into Q"""
    Q, R = np.linalg.qr(rng.standard_normal((d, d)))
    signs = np.sign(np.diag(R))
    signs[signs == 0] = 1.0
    return Q * signs


def rotated_gamma_covariance(d: int, seed: int):
    """Eigenvalues ~ Gamma(1, 1) and the rotation they are applied with

    Returns
    -------
    eigenvalues : np.ndarray
    rotation : np.ndarray
    covariance : np.ndarray
        rotation @ diag(eigenvalues) @ rotation.T
    """
    if d < 1:
        raise KernhmcInputError(f"Dimension must be positive, found {d}")
    rng = make_rng(seed)
    eigenvalues = rng.gamma(shape=1.0, scale=1.0, size=d)
    rotation = random_rotation(d, rng)
    covariance = (rotation * eigenvalues) @ rotation.T
    return eigenvalues, rotation, 0.5 * (covariance + covariance.T)


def make_gaussian(mean, covariance, name="gaussian") -> Target:
    """Multivariate Gaussian target with exact log-density, gradient and sampler"""
    mean = as_vector(mean, name="mean")
    d = mean.shape[0]
    covariance = as_matrix(covariance, dim=d, name="covariance")
    if covariance.shape[0] != d:
        raise KernhmcInputError(
            f"Covariance must be {d} x {d}, found {covariance.shape}"
        )
    try:
        chol = scipy.linalg.cholesky(covariance, lower=True)
    except np.linalg.LinAlgError:
        raise KernhmcInputError("Covariance matrix is not positive definite")
    log_norm = -np.log(np.diag(chol)).sum() - 0.5 * d * np.log(2 * np.pi)

    def log_density(x):
        z = scipy.linalg.solve_triangular(chol, x - mean, lower=True)
        return log_norm - 0.5 * float(z @ z)

    def gradient(x):
        return -scipy.linalg.cho_solve((chol, True), x - mean)

    def sampler(rng):
        return mean + chol @ rng.standard_normal(d)

    return Target(
        dim=d,
        log_density=log_density,
        gradient=gradient,
        sampler=sampler,
        name=name,
    )


def make_isotropic_gaussian(d: int, variance: float = 1.0) -> Target:
    """N(0, variance I), with closed forms that avoid any matrix algebra"""
    if d < 1:
        raise KernhmcInputError(f"Dimension must be positive, found {d}")
    if not variance > 0:
        raise KernhmcInputError(f"Variance must be positive, found {variance}")
    log_norm = -0.5 * d * np.log(2 * np.pi * variance)
    sd = np.sqrt(variance)
    return Target(
        dim=d,
        log_density=lambda x: log_norm - 0.5 * float(x @ x) / variance,
        gradient=lambda x: -x / variance,
        sampler=lambda rng: sd * rng.standard_normal(d),
        name="isotropic_gaussian",
    )


def make_rotated_gamma_gaussian(d: int, seed: int) -> Target:
    """Zero-mean Gaussian whose covariance has Gamma(1, 1) eigenvalues and a
    uniformly random orientation, so its length-scales differ widely across
    principal directions"""
    _, _, covariance = rotated_gamma_covariance(d, seed)
    return make_gaussian(np.zeros(d), covariance, name="rotated_gamma_gaussian")
