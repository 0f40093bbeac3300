"""Random Fourier feature bases approximating the Gaussian and rational-quadratic
kernels, with first and second coordinate derivatives of the feature map"""
import typing as ty
from pathlib import Path
import attrs
import numpy as np
from kernhmc.exceptions import KernhmcDimensionError, KernhmcInputError
from .enum import KernelFamily
from .kernels import KernelSpec
from .streams import make_rng
from .utils import (
    FORMAT_VERSION,
    as_matrix,
    as_vector,
    check_format_version,
    load_yaml,
    save_yaml,
)


@attrs.define(frozen=True, eq=False)
class FeatureBasis:
    """An m-dimensional random Fourier feature embedding

        phi(x)_j = sqrt(2 / m) * cos(omega_j^T x + u_j)

    Parameters
    ----------
    spec : KernelSpec
        the kernel the features approximate
    omegas : np.ndarray
        m x d frequencies
    offsets : np.ndarray
        m phases in [0, 2 pi)
    seed : int or None
        the seed the basis was sampled with, None if the frequencies were
        provided explicitly
    """

    spec: KernelSpec = attrs.field()
    omegas: np.ndarray = attrs.field(repr=False, converter=as_matrix)
    offsets: np.ndarray = attrs.field(repr=False, converter=as_vector)
    seed: ty.Optional[int] = attrs.field(default=None)

    @offsets.validator
    def offsets_validator(self, _, offsets):
        if offsets.shape[0] != self.omegas.shape[0]:
            raise KernhmcDimensionError(
                f"Number of offsets ({offsets.shape[0]}) does not match number of "
                f"frequencies ({self.omegas.shape[0]})"
            )
        if np.any(offsets < 0) or np.any(offsets >= 2 * np.pi):
            raise ValueError("Feature offsets must lie in [0, 2 pi)")

    @property
    def m(self):
        return self.omegas.shape[0]

    @property
    def d(self):
        return self.omegas.shape[1]

    @property
    def scale(self):
        return np.sqrt(2.0 / self.m)

    def __eq__(self, other):
        return (
            isinstance(other, FeatureBasis)
            and self.spec == other.spec
            and self.seed == other.seed
            and np.array_equal(self.omegas, other.omegas)
            and np.array_equal(self.offsets, other.offsets)
        )

    def _check_index(self, index):
        if not 0 <= index < self.d:
            raise KernhmcDimensionError(
                f"Coordinate index {index} out of range for dimension {self.d}"
            )

    def phases(self, X):
        """omega^T x + u for every row of X (n x m)"""
        return as_matrix(X, dim=self.d) @ self.omegas.T + self.offsets

    def transform(self, X):
        """Embeds every row of X, returning an n x m matrix"""
        return self.scale * np.cos(self.phases(X))

    def to_dict(self):
        dct = {
            "format_version": FORMAT_VERSION,
            "kind": "feature_basis",
            "spec": self.spec.to_dict(),
            "m": self.m,
            "d": self.d,
            "seed": self.seed,
        }
        if self.seed is None:
            dct["omegas"] = self.omegas.tolist()
            dct["offsets"] = self.offsets.tolist()
        return dct

    @classmethod
    def from_dict(cls, dct):
        check_format_version(dct, "feature basis")
        spec = KernelSpec.from_dict(dct["spec"])
        if dct.get("seed") is None:
            return cls(spec, np.array(dct["omegas"]), np.array(dct["offsets"]))
        return sample_basis(spec, dct["m"], dct["d"], dct["seed"])

    def save(self, path: ty.Union[str, Path]):
        save_yaml(self.to_dict(), path)

    @classmethod
    def load(cls, path: ty.Union[str, Path]):
        return cls.from_dict(load_yaml(path))


def sample_basis(spec: KernelSpec, m: int, d: int, seed: int) -> FeatureBasis:
    """Draws a random Fourier feature basis for the kernel.

    Gaussian kernels use omega ~ N(0, (2 / sigma) I), the spectral density of
    exp(-|r|^2 / sigma). Rational-quadratic kernels are a Gamma scale mixture of
    Gaussians, so each frequency first draws a precision
    tau ~ Gamma(shape=alpha, rate=alpha * sigma / 2) and then omega ~ N(0, tau I).
    Offsets are Uniform[0, 2 pi).

    Parameters
    ----------
    spec : KernelSpec
        the kernel to approximate
    m : int
        number of features
    d : int
        input dimension
    seed : int
        seed of the Philox stream, the same seed always gives the same basis
    """
    if m < 1 or d < 1:
        raise KernhmcInputError(
            f"Feature basis needs m >= 1 and d >= 1, found m={m}, d={d}"
        )
    rng = make_rng(seed)
    if spec.family is KernelFamily.gaussian:
        precisions = np.full(m, 2.0 / spec.sigma)
    else:
        rate = spec.alpha * spec.sigma / 2.0
        precisions = rng.gamma(shape=spec.alpha, scale=1.0 / rate, size=m)
    omegas = rng.standard_normal((m, d)) * np.sqrt(precisions)[:, None]
    # uniform() may round up to its upper bound
    offsets = np.mod(rng.uniform(0.0, 2 * np.pi, size=m), 2 * np.pi)
    return FeatureBasis(spec=spec, omegas=omegas, offsets=offsets, seed=int(seed))


def phi(basis: FeatureBasis, x) -> np.ndarray:
    return basis.transform(as_vector(x, dim=basis.d))[0]


def phi_dot(basis: FeatureBasis, x, index: int) -> np.ndarray:
    """Derivative of the feature map with respect to coordinate `index` (0-based)"""
    basis._check_index(index)
    phases = basis.phases(as_vector(x, dim=basis.d))[0]
    return -basis.scale * np.sin(phases) * basis.omegas[:, index]


def phi_ddot(basis: FeatureBasis, x, index: int) -> np.ndarray:
    """Second derivative of the feature map with respect to coordinate `index`"""
    basis._check_index(index)
    return -phi(basis, x) * basis.omegas[:, index] ** 2


def feature_jacobian(basis: FeatureBasis, x) -> np.ndarray:
    """d x m matrix whose row l is phi_dot(basis, x, l)"""
    phases = basis.phases(as_vector(x, dim=basis.d))[0]
    return (-basis.scale * np.sin(phases))[None, :] * basis.omegas.T
