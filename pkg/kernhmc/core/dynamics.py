"""Hamiltonian dynamics with identity mass: energies, the leapfrog integrator,
trajectories driven by a learned surrogate gradient and the Metropolis
acceptance probability of trajectory end-points.

The surrogate f approximates log pi, so the surrogate potential is U_k = -f and
the momentum kicks of a kernel-induced trajectory use +grad f."""
import csv
import logging
import typing as ty
from pathlib import Path
import attrs
import numpy as np
from kernhmc.exceptions import KernhmcInputError, KernhmcNumericError
from .utils import as_vector


logger = logging.getLogger("kernhmc")

# |H_i - H_0| above this marks a trajectory as diverged
DIVERGENCE_THRESHOLD = 1e3


def _positive(instance, attribute, value):
    if not value > 0:
        raise ValueError(f"'{attribute.name}' must be positive, found {value}")


@attrs.define(frozen=True)
class HamiltonianParams:
    """Ranges the step size and number of leapfrog steps are drawn uniformly
    from for every proposal

    Parameters
    ----------
    eps_min : float
        smallest step size
    eps_max : float
        largest step size
    L_min : int
        smallest number of leapfrog steps
    L_max : int
        largest number of leapfrog steps
    """

    eps_min: float = attrs.field(default=0.01, converter=float, validator=_positive)
    eps_max: float = attrs.field(default=0.1, converter=float, validator=_positive)
    L_min: int = attrs.field(default=1, converter=int, validator=_positive)
    L_max: int = attrs.field(default=10, converter=int, validator=_positive)

    def __attrs_post_init__(self):
        if self.eps_min > self.eps_max:
            raise ValueError(
                f"eps_min ({self.eps_min}) is larger than eps_max ({self.eps_max})"
            )
        if self.L_min > self.L_max:
            raise ValueError(
                f"L_min ({self.L_min}) is larger than L_max ({self.L_max})"
            )

    def draw(self, rng: np.random.Generator) -> ty.Tuple[float, int]:
        eps = float(rng.uniform(self.eps_min, self.eps_max))
        L = int(rng.integers(self.L_min, self.L_max + 1))
        return eps, L

    def scaled(self, factor: float) -> "HamiltonianParams":
        """The same ranges with both step-size bounds multiplied by `factor`"""
        return attrs.evolve(
            self, eps_min=self.eps_min * factor, eps_max=self.eps_max * factor
        )


@attrs.define(frozen=True, eq=False)
class Trajectory:
    """Recorded states of a leapfrog integration

    Parameters
    ----------
    positions : np.ndarray
        (steps + 1) x d positions, starting with the initial one
    momenta : np.ndarray
        (steps + 1) x d momenta synchronised with the positions
    eps : float
        the step size
    L : int
        the number of steps requested
    energies : np.ndarray or None
        H at each recorded state when an energy function was supplied
    diverged_at : int or None
        the step at which the integration was aborted, None if it completed
    """

    positions: np.ndarray = attrs.field(repr=False)
    momenta: np.ndarray = attrs.field(repr=False)
    eps: float = attrs.field()
    L: int = attrs.field()
    energies: ty.Optional[np.ndarray] = attrs.field(default=None, repr=False)
    diverged_at: ty.Optional[int] = attrs.field(default=None)

    @property
    def diverged(self) -> bool:
        return self.diverged_at is not None

    @property
    def end(self) -> ty.Tuple[np.ndarray, np.ndarray]:
        return self.positions[-1], self.momenta[-1]

    @property
    def d(self):
        return self.positions.shape[1]

    def header(self):
        d = self.d
        return (
            ["step"]
            + [f"q{i + 1}" for i in range(d)]
            + [f"p{i + 1}" for i in range(d)]
            + ["H"]
        )

    def rows(self):
        for step, (q, p) in enumerate(zip(self.positions, self.momenta)):
            H = self.energies[step] if self.energies is not None else float("nan")
            yield [step] + [repr(float(v)) for v in np.concatenate([q, p, [H]])]

    def to_csv(self, path: ty.Union[str, Path]):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(self.header())
            writer.writerows(self.rows())


def hamiltonian(U: ty.Callable[[np.ndarray], float], q, p) -> float:
    """Total energy U(q) + |p|^2 / 2 under identity mass"""
    p = as_vector(p, name="p")
    u = float(U(q))
    if not np.isfinite(u):
        raise KernhmcNumericError(f"Potential energy is not finite at {q}: {u}")
    return u + 0.5 * float(p @ p)


def leapfrog(
    grad_U: ty.Callable[[np.ndarray], np.ndarray],
    q0,
    p0,
    eps: float,
    L: int,
    U: ty.Optional[ty.Callable[[np.ndarray], float]] = None,
) -> Trajectory:
    """Integrates Hamilton's equations with L leapfrog steps of size eps.

    Each step is a momentum half-kick, a full position drift and a second
    half-kick, the gradient at the new position being reused by the next step's
    first half-kick, so that every state in the trajectory has synchronised
    position and momentum at one gradient evaluation per step.

    Parameters
    ----------
    grad_U : callable
        gradient of the potential energy
    q0 : np.ndarray
        initial position
    p0 : np.ndarray
        initial momentum
    eps : float
        step size, must be positive
    L : int
        number of steps, at least 1
    U : callable, optional
        the potential energy. When given, energies are recorded and a step
        whose energy error exceeds DIVERGENCE_THRESHOLD aborts the integration

    Returns
    -------
    Trajectory
        the recorded states. A non-finite gradient or state truncates the
        trajectory at the last finite state and sets `diverged_at`
    """
    if not eps > 0:
        raise KernhmcInputError(f"Leapfrog step size must be positive, found {eps}")
    if L < 1:
        raise KernhmcInputError(f"Leapfrog needs at least one step, found L={L}")
    q = as_vector(q0, name="q0").copy()
    p = as_vector(p0, dim=q.shape[0], name="p0").copy()
    positions = [q.copy()]
    momenta = [p.copy()]
    energies = [hamiltonian(U, q, p)] if U is not None else None
    diverged_at = None
    g = np.asarray(grad_U(q), dtype=float)
    for step in range(1, L + 1):
        if not np.all(np.isfinite(g)):
            diverged_at = step
            break
        p_half = p - 0.5 * eps * g
        q = q + eps * p_half
        g = np.asarray(grad_U(q), dtype=float)
        p = p_half - 0.5 * eps * g
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p))):
            diverged_at = step
            break
        if energies is not None:
            u = float(U(q))
            H = u + 0.5 * float(p @ p)
            if not np.isfinite(H) or abs(H - energies[0]) > DIVERGENCE_THRESHOLD:
                diverged_at = step
                break
            energies.append(H)
        positions.append(q.copy())
        momenta.append(p.copy())
    if diverged_at is not None:
        logger.debug("Leapfrog trajectory diverged at step %d of %d", diverged_at, L)
    return Trajectory(
        positions=np.array(positions),
        momenta=np.array(momenta),
        eps=float(eps),
        L=int(L),
        energies=np.array(energies) if energies is not None else None,
        diverged_at=diverged_at,
    )


def accept_prob(H_start: float, H_end: float) -> float:
    """Metropolis acceptance probability min(1, exp(H_start - H_end)) of a
    trajectory end-point. H_end may be +inf (probability 0)"""
    if np.isnan(H_start) or np.isnan(H_end):
        raise KernhmcNumericError(
            f"Cannot compute acceptance probability from NaN energies "
            f"({H_start}, {H_end})"
        )
    if not np.isfinite(H_start):
        raise KernhmcNumericError(f"Initial energy must be finite, found {H_start}")
    if H_end == np.inf:
        return 0.0
    return float(np.exp(min(0.0, H_start - H_end)))


@attrs.define(frozen=True, eq=False)
class Proposal:
    """End-point of a kernel-induced trajectory

    Parameters
    ----------
    q_start : np.ndarray
        the position the trajectory started from
    q_star : np.ndarray
        proposed position (equals q_start if the trajectory diverged)
    p_start : np.ndarray
        the momentum drawn at the start
    p_end : np.ndarray
        momentum at the end-point
    eps : float
        step size used
    L : int
        number of leapfrog steps used
    diverged : bool
        True if the trajectory was aborted, in which case the proposal must be
        rejected
    trajectory : Trajectory, optional
        the full trajectory, if requested
    """

    q_start: np.ndarray = attrs.field(repr=False)
    q_star: np.ndarray = attrs.field(repr=False)
    p_start: np.ndarray = attrs.field(repr=False)
    p_end: np.ndarray = attrs.field(repr=False)
    eps: float = attrs.field()
    L: int = attrs.field()
    diverged: bool = attrs.field(default=False)
    trajectory: ty.Optional[Trajectory] = attrs.field(default=None, repr=False)

    def log_momentum_ratio(self) -> float:
        """log N(p_end) - log N(p_start), the kinetic part of the acceptance
        ratio"""
        return 0.5 * float(self.p_start @ self.p_start - self.p_end @ self.p_end)

    def acceptance(self, U: ty.Callable[[np.ndarray], float]) -> float:
        """Hypothetical acceptance probability of the end-point under the true
        potential U"""
        if self.diverged:
            return 0.0
        H_start = hamiltonian(U, self.q_start, self.p_start)
        try:
            H_end = hamiltonian(U, self.q_star, self.p_end)
        except KernhmcNumericError:
            H_end = np.inf
        return accept_prob(H_start, H_end)


def kernel_induced_proposal(
    grad_f: ty.Callable[[np.ndarray], np.ndarray],
    q,
    params: HamiltonianParams,
    rng: np.random.Generator,
    log_f: ty.Optional[ty.Callable[[np.ndarray], float]] = None,
    keep_trajectory: bool = False,
) -> Proposal:
    """Simulates the Hamiltonian flow of the surrogate potential U_k = -f from q
    with a fresh standard-normal momentum and randomised (eps, L)

    Parameters
    ----------
    grad_f : callable
        gradient of the surrogate log-density f
    q : np.ndarray
        current position
    params : HamiltonianParams
        the step size and step count ranges
    rng : numpy.random.Generator
        the chain's random stream
    log_f : callable, optional
        the surrogate log-density, used to detect energy blow-ups of the
        surrogate dynamics
    keep_trajectory : bool
        whether to attach the full trajectory to the proposal
    """
    q = as_vector(q, name="q")
    p_start = rng.standard_normal(q.shape[0])
    eps, L = params.draw(rng)
    U = (lambda x: -log_f(x)) if log_f is not None else None
    trajectory = leapfrog(lambda x: -np.asarray(grad_f(x)), q, p_start, eps, L, U=U)
    if trajectory.diverged:
        return Proposal(
            q_start=q,
            q_star=q.copy(),
            p_start=p_start,
            p_end=p_start.copy(),
            eps=eps,
            L=L,
            diverged=True,
            trajectory=trajectory if keep_trajectory else None,
        )
    q_star, p_end = trajectory.end
    return Proposal(
        q_start=q,
        q_star=q_star,
        p_start=p_start,
        p_end=p_end,
        eps=eps,
        L=L,
        trajectory=trajectory if keep_trajectory else None,
    )
