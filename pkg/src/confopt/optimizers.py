"""Momentum methods as iteration maps, in algorithmic and phase-space form.

Every stepper is a pure function of the current state and parameters and
calls the gradient oracle exactly once. :func:`run` drives a stepper over a
:class:`~confopt.problems.Problem` and records a :class:`~confopt.core.Trace`.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import (
    DIVERGENCE_BOUND,
    AlgState,
    OptimizerParams,
    ParameterError,
    PhaseState,
    PhysicalParams,
    Trace,
    exceeds,
)
from .integrators import kinetic_gradient

GradFn = Callable[[np.ndarray], np.ndarray]


# --- algorithmic form ------------------------------------------------------

def gd_step(s: AlgState, p: OptimizerParams, gradfn: GradFn) -> AlgState:
    """Plain gradient descent; ``v`` stores the last displacement."""
    v = -p.epsilon * gradfn(s.x)
    return AlgState(s.x + v, v, s.k + 1)


def cm_step(s: AlgState, p: OptimizerParams, grad: np.ndarray) -> AlgState:
    """Heavy ball: ``v <- mu v - eps grad f(x)``, ``x <- x + v``.

    ``grad`` must be the gradient at ``s.x``.
    """
    v = p.mu * s.v - p.epsilon * grad
    return AlgState(s.x + v, v, s.k + 1)


def nag_step(s: AlgState, p: OptimizerParams, gradfn: GradFn) -> AlgState:
    """Nesterov: the gradient is taken at the lookahead point ``x + mu v``."""
    mv = p.mu * s.v
    v = mv - p.epsilon * gradfn(s.x + mv)
    return AlgState(s.x + v, v, s.k + 1)


def sequence_momentum(k: int) -> float:
    """``k / (k + 3)``: the momentum used to form the ``(k+1)``-th lookahead."""
    if k < 0:
        raise ParameterError(f"k must be >= 0, got {k}")
    return k / (k + 3.0)


def nag_sequence_step(s: AlgState, k: int, epsilon: float, gradfn: GradFn) -> AlgState:
    """Nesterov with the ``k/(k+3)`` schedule, written on ``v_k = x_k - x_{k-1}``.

    Step ``k`` looks ahead to ``y_k = x_k + mu_k v_k`` where ``mu_k`` is the
    schedule value produced at the previous step (zero at ``k = 0``).
    """
    if k < 0:
        raise ParameterError(f"k must be >= 0, got {k}")
    mu = sequence_momentum(k - 1) if k > 0 else 0.0
    y = s.x + mu * s.v
    x = y - epsilon * gradfn(y)
    return AlgState(x, x - s.x, s.k + 1)


class NesterovSequence:
    """Nesterov's two-sequence form ``x_{k+1} = y_k - eps grad f(y_k)``,
    ``y_{k+1} = x_{k+1} + mu_{k+1} (x_{k+1} - x_k)`` with ``mu_{k+1} = k/(k+3)``.

    Keeps ``x_k`` and ``x_{k-1}`` internally.
    """

    def __init__(self, x0, epsilon: float):
        self.x = np.array(x0, dtype=float)
        self.x_prev = self.x.copy()
        self.y = self.x.copy()
        self.epsilon = float(epsilon)
        self.k = 0

    def step(self, gradfn: GradFn) -> np.ndarray:
        x_new = self.y - self.epsilon * gradfn(self.y)
        self.y = x_new + sequence_momentum(self.k) * (x_new - self.x)
        self.x_prev, self.x = self.x, x_new
        self.k += 1
        return x_new


def rgd_step(s: AlgState, p: OptimizerParams, gradfn: GradFn) -> AlgState:
    """Relativistic gradient descent (one gradient call at the midpoint).

    The position update is normalised by ``sqrt(delta |v|^2 + 1)``, so the
    displacement from ``alpha x_half + (1 - alpha) x`` never exceeds
    ``delta ** -0.5``.
    """
    sqmu = math.sqrt(p.mu)
    vv = float(np.dot(s.v, s.v))
    x_half = s.x + sqmu / math.sqrt(p.mu * p.delta * vv + 1.0) * s.v
    v_half = sqmu * s.v - p.epsilon * gradfn(x_half)
    ww = float(np.dot(v_half, v_half))
    base = x_half if p.alpha == 1.0 else p.alpha * x_half + (1.0 - p.alpha) * s.x
    x = base + v_half / math.sqrt(p.delta * ww + 1.0)
    return AlgState(x, sqmu * v_half, s.k + 1)


# --- phase-space form ------------------------------------------------------

def cm_phase_step(z: PhaseState, phys: PhysicalParams, gradfn: GradFn) -> PhaseState:
    """Heavy ball on phase space: ``p <- e^{-gamma h} p - h grad f(x)``, ``x <- x + (h/m) p``."""
    p = phys.mu * z.p - phys.h * gradfn(z.x)
    return PhaseState(z.x + (phys.h / phys.m) * p, p, z.t + phys.h)


def nag_phase_step(z: PhaseState, phys: PhysicalParams, gradfn: GradFn) -> PhaseState:
    """Nesterov on phase space; pairs with the heavy-ball parameter map."""
    h, m, mu = phys.h, phys.m, phys.mu
    x_half = z.x + (h / m) * mu * z.p
    p = mu * z.p - h * gradfn(x_half)
    return PhaseState(z.x + (h / m) * p, p, z.t + h)


def relativistic_euler_step(z: PhaseState, phys: PhysicalParams, gradfn: GradFn) -> PhaseState:
    """Relativistic heavy ball: the position moves at most ``h c`` per step."""
    p = phys.mu * z.p - phys.h * gradfn(z.x)
    return PhaseState(z.x + phys.h * kinetic_gradient(p, phys.m, phys.c), p, z.t + phys.h)


def rgd_phase_step(z: PhaseState, phys: PhysicalParams, alpha: float, gradfn: GradFn) -> PhaseState:
    """Relativistic gradient descent on phase space.

    With ``alpha = 1`` this is the dissipative leapfrog for the relativistic
    Hamiltonian; with ``alpha = 0`` and ``c = inf`` it is Nesterov's method.
    """
    if not 0 <= alpha <= 1:
        raise ParameterError(f"alpha must lie in [0, 1], got {alpha}")
    h, m, c = phys.h, phys.m, phys.c
    half = math.exp(-0.5 * phys.gamma * h)
    p0 = half * z.p
    x_half = z.x + 0.5 * h * kinetic_gradient(p0, m, c)
    p_half = p0 - h * gradfn(x_half)
    x = alpha * x_half + (1.0 - alpha) * z.x + 0.5 * h * kinetic_gradient(p_half, m, c)
    return PhaseState(x, half * p_half, z.t + h)


# --- run loop ----------------------------------------------------------------

def _cm(s, p, gradfn):
    return cm_step(s, p, gradfn(s.x))


def _nag_sequence(s, p, gradfn):
    return nag_sequence_step(s, s.k, p.epsilon, gradfn)


METHODS: dict[str, Callable[[AlgState, OptimizerParams, GradFn], AlgState]] = {
    "gd": gd_step,
    "cm": _cm,
    "nag": nag_step,
    "nag_sequence": _nag_sequence,
    "rgd": rgd_step,
}

# hyperparameters each method actually reads
METHOD_PARAMS = {
    "gd": ("epsilon",),
    "cm": ("epsilon", "mu"),
    "nag": ("epsilon", "mu"),
    "nag_sequence": ("epsilon",),
    "rgd": ("epsilon", "mu", "delta", "alpha"),
}


def get_stepper(method):
    if callable(method):
        return method
    try:
        return METHODS[method]
    except KeyError:
        raise ParameterError(f"unknown method {method!r}; choose from {sorted(METHODS)}") from None


@dataclass(frozen=True)
class StopCriteria:
    """When to end a run.

    ``grad_tol`` and ``f_tol`` are inactive at 0. ``f_tol`` is a target on
    ``f(x) - f_ref`` where ``f_ref`` is the problem's known minimum value
    (0 if none is declared).
    """

    max_iters: int = 1000
    grad_tol: float = 0.0
    f_tol: float = 0.0
    divergence_bound: float = DIVERGENCE_BOUND

    def __post_init__(self):
        if int(self.max_iters) != self.max_iters or self.max_iters < 0:
            raise ParameterError(f"max_iters must be a nonnegative integer, got {self.max_iters}")
        if self.grad_tol < 0 or self.f_tol < 0:
            raise ParameterError("grad_tol and f_tol must be >= 0")
        if not self.divergence_bound > 0:
            raise ParameterError("divergence_bound must be > 0")


class CountingGradient:
    """Wraps a gradient oracle, counting calls and reusing the last result.

    The cache is hit only when called again on an identical point, which
    happens for the heavy ball between recording an iterate and stepping.
    """

    def __init__(self, grad: GradFn, cache: bool = False):
        self.grad = grad
        self.calls = 0
        self.cache = cache
        self._x = None
        self._g = None

    def __call__(self, x):
        if self.cache and self._x is not None and np.array_equal(x, self._x):
            return self._g
        self.calls += 1
        g = np.asarray(self.grad(x), dtype=float)
        if self.cache:
            self._x, self._g = np.array(x, copy=True), g
        return g


def run(method, problem, params: OptimizerParams, init: AlgState | None = None,
        stop: StopCriteria | None = None, record_states: bool = True) -> Trace:
    """Iterate ``method`` on ``problem`` until a stop criterion fires.

    Divergence is never raised: the run stops and the trace is flagged.
    With ``record_states=False`` only the final state is kept in ``states``.
    """
    stepper = get_stepper(method)
    stop = stop or StopCriteria()
    state = init if init is not None else AlgState(problem.init_default)
    if state.dim != problem.dim:
        raise ParameterError(f"initial state has dimension {state.dim}, problem has {problem.dim}")
    f_ref = problem.known_min[1] if problem.known_min is not None else 0.0
    bound = stop.divergence_bound
    gradfn = CountingGradient(problem.grad, cache=True)
    trace = Trace()
    t0 = time.perf_counter()

    def record(s):
        f = float(problem.f(s.x))
        gn = float(np.linalg.norm(gradfn(s.x)))
        if record_states or not trace.states:
            trace.states.append(s)
        else:
            trace.states[-1] = s
        trace.fvals.append(f)
        trace.gradnorms.append(gn)
        bad = s.diverged(bound) or not (abs(f) <= bound) or not (gn <= bound)
        return f, gn, bad

    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        f, gn, bad = record(state)
        while True:
            if bad:
                trace.diverged, trace.reason = True, "diverged"
                break
            hit_g = stop.grad_tol > 0 and gn <= stop.grad_tol
            hit_f = stop.f_tol > 0 and f - f_ref <= stop.f_tol
            if hit_g or hit_f:
                trace.converged = True
                trace.reason = "+".join(r for r, hit in (("grad_tol", hit_g), ("f_tol", hit_f)) if hit)
                break
            if state.k - (init.k if init is not None else 0) >= stop.max_iters:
                trace.reason = "max_iters"
                break
            state = stepper(state, params, gradfn)
            f, gn, bad = record(state)

    trace.grad_calls = gradfn.calls
    trace.wallclock = time.perf_counter() - t0
    return trace

