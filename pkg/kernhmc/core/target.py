import typing as ty
import attrs
import numpy as np
from kernhmc.exceptions import KernhmcInputError
from .utils import as_vector


@attrs.define(frozen=True, eq=False)
class Target:
    """A density to sample from, given by whichever of its parts are available

    Parameters
    ----------
    dim : int
        dimension of the sample space
    log_density : callable, optional
        x -> exact unnormalised log-density
    estimate_log_density : callable, optional
        (x, rng) -> log of a non-negative unbiased estimate of the unnormalised
        density. When present, samplers use it (pseudo-marginal mode) in
        preference to `log_density`
    gradient : callable, optional
        x -> exact gradient of the log-density
    sampler : callable, optional
        rng -> exact draw from the target
    name : str
        label used in logs and outputs
    """

    dim: int = attrs.field(converter=int)
    log_density: ty.Optional[ty.Callable[[np.ndarray], float]] = attrs.field(
        default=None
    )
    estimate_log_density: ty.Optional[
        ty.Callable[[np.ndarray, np.random.Generator], float]
    ] = attrs.field(default=None)
    gradient: ty.Optional[ty.Callable[[np.ndarray], np.ndarray]] = attrs.field(
        default=None
    )
    sampler: ty.Optional[ty.Callable[[np.random.Generator], np.ndarray]] = attrs.field(
        default=None
    )
    name: str = attrs.field(default="target")

    def __attrs_post_init__(self):
        if self.dim < 1:
            raise KernhmcInputError(f"Target dimension must be positive ({self.dim})")
        if self.log_density is None and self.estimate_log_density is None:
            raise KernhmcInputError(
                f"Target '{self.name}' needs an exact or an estimated log-density"
            )

    @property
    def is_noisy(self) -> bool:
        return self.estimate_log_density is not None

    @property
    def has_gradient(self) -> bool:
        return self.gradient is not None

    def evaluate(self, x, rng: np.random.Generator) -> float:
        """The log-target value a sampler stores for x: a fresh estimate for noisy
        targets, the exact log-density otherwise"""
        x = as_vector(x, dim=self.dim)
        if self.estimate_log_density is not None:
            return float(self.estimate_log_density(x, rng))
        return float(self.log_density(x))

    def grad(self, x) -> np.ndarray:
        if self.gradient is None:
            raise KernhmcInputError(f"Target '{self.name}' has no exact gradient")
        return np.asarray(self.gradient(as_vector(x, dim=self.dim)), dtype=float)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """n x dim exact draws"""
        if self.sampler is None:
            raise KernhmcInputError(
                f"Target '{self.name}' cannot be sampled from directly"
            )
        return np.array([self.sampler(rng) for _ in range(n)]).reshape(n, self.dim)
