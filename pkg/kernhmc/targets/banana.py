"""The banana-shaped target: a Gaussian N(0, diag(v, 1, ..., 1)) whose second
coordinate is shifted by b (x_1^2 - v)"""
import attrs
import numpy as np
from kernhmc.core.target import Target
from kernhmc.core.utils import as_matrix, as_vector


def _at_least_two(instance, attribute, value):
    if value < 2:
        raise ValueError(f"Banana target needs d >= 2, found {value}")


def _positive(instance, attribute, value):
    if not value > 0:
        raise ValueError(f"'{attribute.name}' must be positive, found {value}")


@attrs.define(frozen=True)
class BananaParams:
    """Parameters of the banana. The defaults give the strongly twisted
    8-dimensional benchmark

    Parameters
    ----------
    d : int
        dimension, at least 2
    b : float
        twist
    v : float
        variance of the first coordinate
    """

    d: int = attrs.field(default=8, converter=int, validator=_at_least_two)
    b: float = attrs.field(default=0.03, converter=float)
    v: float = attrs.field(default=100.0, converter=float, validator=_positive)


def _twist(y, params):
    return y[..., 1] - params.b * (y[..., 0] ** 2 - params.v)


def banana_log_density(y, params: BananaParams) -> float:
    """log N(y_1; 0, v) + log N(y_2; b (y_1^2 - v), 1) + sum_{j>2} log N(y_j; 0, 1)"""
    y = as_vector(y, dim=params.d, name="y")
    r = _twist(y, params)
    rest = y[2:]
    return float(
        -0.5 * params.d * np.log(2 * np.pi)
        - 0.5 * np.log(params.v)
        - 0.5 * y[0] ** 2 / params.v
        - 0.5 * r**2
        - 0.5 * rest @ rest
    )


def banana_gradient(y, params: BananaParams) -> np.ndarray:
    y = as_vector(y, dim=params.d, name="y")
    r = _twist(y, params)
    grad = -y.copy()
    grad[0] = -y[0] / params.v + 2 * params.b * y[0] * r
    grad[1] = -r
    return grad


def banana_sample(params: BananaParams, rng: np.random.Generator, size=None):
    """Draws from the banana by twisting Gaussian draws. Returns a d-vector, or a
    size x d matrix when `size` is given"""
    n = 1 if size is None else int(size)
    X = rng.standard_normal((n, params.d))
    X[:, 0] *= np.sqrt(params.v)
    X[:, 1] += params.b * (X[:, 0] ** 2 - params.v)
    return X[0] if size is None else X


def banana_log_density_batch(Y, params: BananaParams) -> np.ndarray:
    """Vectorised `banana_log_density` over the rows of Y"""
    Y = as_matrix(Y, dim=params.d, name="Y")
    r = _twist(Y, params)
    return (
        -0.5 * params.d * np.log(2 * np.pi)
        - 0.5 * np.log(params.v)
        - 0.5 * Y[:, 0] ** 2 / params.v
        - 0.5 * r**2
        - 0.5 * (Y[:, 2:] ** 2).sum(axis=1)
    )


def make_banana(params: BananaParams = BananaParams()) -> Target:
    return Target(
        dim=params.d,
        log_density=lambda y: banana_log_density(y, params),
        gradient=lambda y: banana_gradient(y, params),
        sampler=lambda rng: banana_sample(params, rng),
        name="banana",
    )
