"""State containers and the maps between algorithmic and phase-space parameters.

An optimizer iterates an algorithmic point ``(x, v)`` with parameters
``(epsilon, mu, delta, alpha)``. The same iteration read as a discretised
dissipative Hamiltonian flow lives on phase space ``(x, p)`` with step size
``h``, damping ``gamma``, mass ``m`` and speed of light ``c``. The functions
here translate between the two pictures.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

DIVERGENCE_BOUND = 1e12


class ParameterError(ValueError):
    """A parameter or state field is outside its admissible range."""


def _frozen_vector(a) -> np.ndarray:
    arr = np.array(a, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise ParameterError(f"expected a 1-D vector, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


def exceeds(arr: np.ndarray, bound: float = DIVERGENCE_BOUND) -> bool:
    """True if any entry is non-finite or larger than ``bound`` in magnitude."""
    if arr.size == 0:
        return False
    top = float(np.max(np.abs(arr)))
    # NaN fails the comparison; inf is caught even when the bound is inf
    return not (top <= bound and math.isfinite(top))


@dataclass(frozen=True, eq=False)
class AlgState:
    """Algorithmic iterate: position ``x``, velocity ``v`` and iteration ``k``.

    Non-finite entries are allowed so that a blown-up run can be inspected;
    use :meth:`diverged` to detect them.
    """

    x: np.ndarray
    v: np.ndarray = None
    k: int = 0

    def __post_init__(self):
        x = _frozen_vector(self.x)
        v = np.zeros_like(x) if self.v is None else _frozen_vector(self.v)
        if x.shape != v.shape:
            raise ParameterError(f"dim(x)={x.size} != dim(v)={v.size}")
        if int(self.k) != self.k or self.k < 0:
            raise ParameterError(f"iteration counter must be a nonnegative integer, got {self.k}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "k", int(self.k))

    @property
    def dim(self) -> int:
        return self.x.size

    def diverged(self, bound: float = DIVERGENCE_BOUND) -> bool:
        return exceeds(self.x, bound) or exceeds(self.v, bound)


@dataclass(frozen=True, eq=False)
class PhaseState:
    """Phase-space point ``z = (x, p)`` at time ``t``."""

    x: np.ndarray
    p: np.ndarray = None
    t: float = 0.0

    def __post_init__(self):
        x = _frozen_vector(self.x)
        p = np.zeros_like(x) if self.p is None else _frozen_vector(self.p)
        if x.shape != p.shape:
            raise ParameterError(f"dim(x)={x.size} != dim(p)={p.size}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "t", float(self.t))

    @property
    def dim(self) -> int:
        return self.x.size

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.x, self.p])

    @classmethod
    def from_vector(cls, z, t: float = 0.0) -> "PhaseState":
        z = np.asarray(z, dtype=np.float64)
        if z.ndim != 1 or z.size % 2:
            raise ParameterError(f"phase vector must be 1-D of even length, got shape {z.shape}")
        n = z.size // 2
        return cls(z[:n], z[n:], t)

    def diverged(self, bound: float = DIVERGENCE_BOUND) -> bool:
        return exceeds(self.x, bound) or exceeds(self.p, bound)


@dataclass(frozen=True)
class OptimizerParams:
    """Learning rate, momentum factor, relativistic strength and interpolation.

    ``delta`` and ``alpha`` are only read by relativistic gradient descent;
    ``alpha=1`` gives the conformal symplectic variant.
    """

    epsilon: float
    mu: float
    delta: float = 0.0
    alpha: float = 1.0

    def __post_init__(self):
        for name in ("epsilon", "mu", "delta", "alpha"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ParameterError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if not self.epsilon > 0:
            raise ParameterError(f"epsilon must be > 0, got {self.epsilon}")
        if not 0 < self.mu < 1:
            raise ParameterError(f"mu must lie in (0, 1), got {self.mu}")
        if not self.delta >= 0:
            raise ParameterError(f"delta must be >= 0, got {self.delta}")
        if not 0 <= self.alpha <= 1:
            raise ParameterError(f"alpha must lie in [0, 1], got {self.alpha}")


@dataclass(frozen=True)
class PhysicalParams:
    """Step size ``h``, damping ``gamma``, mass ``m`` and speed of light ``c``.

    ``c = math.inf`` selects the classical kinetic energy ``|p|^2 / 2m``.
    """

    h: float
    gamma: float
    m: float = 1.0
    c: float = math.inf

    def __post_init__(self):
        for name in ("h", "gamma", "m", "c"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not (math.isfinite(self.h) and self.h > 0):
            raise ParameterError(f"h must be finite and > 0, got {self.h}")
        if not (math.isfinite(self.gamma) and self.gamma >= 0):
            raise ParameterError(f"gamma must be finite and >= 0, got {self.gamma}")
        if not (math.isfinite(self.m) and self.m > 0):
            raise ParameterError(f"m must be finite and > 0, got {self.m}")
        if not self.c > 0:
            raise ParameterError(f"c must be > 0 (or inf), got {self.c}")

    @property
    def classical(self) -> bool:
        return math.isinf(self.c)

    @property
    def mu(self) -> float:
        """Per-step momentum contraction ``exp(-gamma h)``."""
        return math.exp(-self.gamma * self.h)


@dataclass
class Trace:
    """Per-iteration record of a run, initial point included."""

    states: list = field(default_factory=list)
    fvals: list = field(default_factory=list)
    gradnorms: list = field(default_factory=list)
    diverged: bool = False
    wallclock: float = 0.0
    converged: bool = False
    reason: str = ""
    grad_calls: int = 0

    @property
    def iterations(self) -> int:
        return len(self.fvals) - 1

    @property
    def final(self) -> AlgState:
        return self.states[-1]

    @property
    def best_f(self) -> float:
        """Smallest finite objective value recorded (``inf`` if none)."""
        f = np.asarray(self.fvals, dtype=float)
        f = f[np.isfinite(f)]
        return float(f.min()) if f.size else math.inf


# --- parameter correspondences -------------------------------------------

def _gamma_from_mu(mu: float, h: float) -> float:
    if not 0 < mu < 1:
        raise ParameterError(f"mu must lie in (0, 1) for a positive damping, got {mu}")
    return -math.log(mu) / h


def _check_mass(m: float) -> float:
    m = float(m)
    if not (math.isfinite(m) and m > 0):
        raise ParameterError(f"m must be finite and > 0, got {m}")
    return m


def cm_params_to_physical(p: OptimizerParams, m: float = 1.0) -> PhysicalParams:
    """Heavy ball: ``v = (h/m) p``, ``epsilon = h^2/m``, ``mu = exp(-gamma h)``."""
    m = _check_mass(m)
    if p.delta != 0:
        raise ParameterError("classical momentum has no relativistic correspondence (delta != 0)")
    h = math.sqrt(p.epsilon * m)
    return PhysicalParams(h=h, gamma=_gamma_from_mu(p.mu, h), m=m)


def cm_physical_to_params(phys: PhysicalParams) -> OptimizerParams:
    if not phys.classical:
        raise ParameterError("classical momentum requires c = inf")
    return OptimizerParams(epsilon=phys.h**2 / phys.m, mu=phys.mu, delta=0.0)


def nag_params_to_physical(p: OptimizerParams, m: float = 1.0) -> PhysicalParams:
    """Half-step scaling ``v = (h/2m) p``, ``epsilon = h^2/(2m)``.

    This is the scaling of the leapfrog-type form of Nesterov's method. The
    phase-space form in :func:`confopt.optimizers.nag_phase_step` instead
    pairs with :func:`cm_params_to_physical`.
    """
    m = _check_mass(m)
    if p.delta != 0:
        raise ParameterError("Nesterov's method has no relativistic correspondence (delta != 0)")
    h = math.sqrt(2.0 * p.epsilon * m)
    return PhysicalParams(h=h, gamma=_gamma_from_mu(p.mu, h), m=m)


def nag_physical_to_params(phys: PhysicalParams) -> OptimizerParams:
    if not phys.classical:
        raise ParameterError("Nesterov's method requires c = inf")
    return OptimizerParams(epsilon=phys.h**2 / (2.0 * phys.m), mu=phys.mu, delta=0.0)


def rgd_params_to_physical(p: OptimizerParams, m: float = 1.0) -> PhysicalParams:
    """Relativistic map: the half-step scaling plus ``delta = 4 / (c^2 h^2)``."""
    m = _check_mass(m)
    h = math.sqrt(2.0 * p.epsilon * m)
    c = math.inf if p.delta == 0 else 2.0 / (h * math.sqrt(p.delta))
    return PhysicalParams(h=h, gamma=_gamma_from_mu(p.mu, h), m=m, c=c)


def rgd_physical_to_params(phys: PhysicalParams, alpha: float = 1.0) -> OptimizerParams:
    delta = 0.0 if phys.classical else 4.0 / (phys.c**2 * phys.h**2)
    return OptimizerParams(epsilon=phys.h**2 / (2.0 * phys.m), mu=phys.mu, delta=delta, alpha=alpha)


# v = scale * p, with scale h/m (heavy ball) or h/(2m) (half-step forms)
_VELOCITY_SCALE = {"cm": 1.0, "nag": 1.0, "rgd": 0.5, "half": 0.5}


def velocity_scale(phys: PhysicalParams, form: str = "cm") -> float:
    try:
        return _VELOCITY_SCALE[form] * phys.h / phys.m
    except KeyError:
        raise ParameterError(f"unknown correspondence form {form!r}") from None


def alg_to_phase(s: AlgState, phys: PhysicalParams, form: str = "cm") -> PhaseState:
    return PhaseState(s.x, s.v / velocity_scale(phys, form), s.k * phys.h)


def phase_to_alg(z: PhaseState, phys: PhysicalParams, form: str = "cm", k: int | None = None) -> AlgState:
    if k is None:
        k = int(round(z.t / phys.h))
    return AlgState(z.x, velocity_scale(phys, form) * z.p, k)
