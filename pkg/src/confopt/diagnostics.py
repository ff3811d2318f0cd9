"""Numerical checks of the structural properties of the integrators.

* finite-difference Jacobians and the conformal symplectic residual
  ``max |J^T Omega J - exp(-gamma h) Omega|``;
* Nesterov's one-step symplectic-area factor on a quadratic;
* a step-doubling RK4 reference flow, used as the oracle for one-step
  order estimation;
* modified (shadow) vector fields of heavy ball and Nesterov, and the heavy
  ball shadow Hamiltonian.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .core import PhaseState, PhysicalParams
from .integrators import SeparableHamiltonian, conformal_euler_step, kinetic_gradient
from .optimizers import nag_phase_step

Vector = np.ndarray
RHS = Callable[[Vector], Vector]


class DiagnosticsError(RuntimeError):
    """A diagnostic could not be computed reliably."""


# --- Jacobians and symplectic residuals ---------------------------------------

def symplectic_matrix(n: int) -> np.ndarray:
    """``Omega = [[0, I], [-I, 0]]`` for ``n`` degrees of freedom."""
    I = np.eye(n)
    Z = np.zeros((n, n))
    return np.block([[Z, I], [-I, Z]])


def numerical_jacobian(fn: Callable[[Vector], Vector], z, fd_step: float = 1e-5) -> np.ndarray:
    """Central-difference Jacobian of a map on flat vectors.

    ``z`` may be a :class:`PhaseState`, in which case ``fn`` still receives and
    returns flat ``(x, p)`` vectors.
    """
    if not fd_step > 0:
        raise ValueError("fd_step must be > 0")
    z = z.as_vector() if isinstance(z, PhaseState) else np.asarray(z, dtype=float)
    cols = []
    for j in range(z.size):
        e = np.zeros_like(z)
        e[j] = fd_step
        cols.append((np.asarray(fn(z + e)) - np.asarray(fn(z - e))) / (2.0 * fd_step))
    J = np.column_stack(cols)
    if not np.all(np.isfinite(J)):
        raise DiagnosticsError("non-finite entries in finite-difference Jacobian")
    return J


def conformal_residual(J: np.ndarray, gamma: float, h: float) -> float:
    """Max-abs entry of ``J^T Omega J - exp(-gamma h) Omega``."""
    J = np.asarray(J, dtype=float)
    if J.ndim != 2 or J.shape[0] != J.shape[1] or J.shape[0] % 2:
        raise ValueError(f"expected a square matrix of even size, got {J.shape}")
    Om = symplectic_matrix(J.shape[0] // 2)
    return float(np.max(np.abs(J.T @ Om @ J - math.exp(-gamma * h) * Om)))


@dataclass
class JacobianReport:
    J: np.ndarray
    residual_conformal: float
    det_J: float
    fd_step: float

    def to_dict(self) -> dict:
        return {"residual_conformal": self.residual_conformal, "det_J": self.det_J, "fd_step": self.fd_step}


def jacobian_report(fn, z, gamma: float, h: float, fd_step: float = 1e-5) -> JacobianReport:
    """``contraction = exp(-gamma h)`` is what a conformal symplectic map must hit."""
    J = numerical_jacobian(fn, z, fd_step)
    return JacobianReport(J, conformal_residual(J, gamma, h), float(np.linalg.det(J)), fd_step)


def flat_phase_map(step: Callable[[PhaseState], PhaseState]) -> Callable[[Vector], Vector]:
    """Turn a PhaseState -> PhaseState step into a map on flat ``(x, p)`` vectors."""
    return lambda z: step(PhaseState.from_vector(z)).as_vector()


def flat_alg_map(step, params, gradfn) -> Callable[[Vector], Vector]:
    """Same for an algorithmic stepper acting on ``(x, v)``."""
    from .core import AlgState

    def fn(z):
        n = z.size // 2
        s = step(AlgState(z[:n], z[n:]), params, gradfn)
        return np.concatenate([s.x, s.v])

    return fn


def nag_contraction_factor(lam: float, m: float, gamma: float, h: float) -> float:
    """Exact one-step area factor ``exp(-gamma h) (1 - h^2 lam / m)`` of Nesterov on ``lam x^2 / 2``.

    The conformal symplectic value is ``exp(-gamma h)``; the bracket is the
    Hessian-driven excess damping (excitation when ``lam < 0``).
    """
    return math.exp(-gamma * h) * (1.0 - h * h * lam / m)


# --- reference flow -------------------------------------------------------

def rk4_integrate(system: RHS, z0: Vector, T: float, n: int) -> Vector:
    """Classic fourth-order Runge-Kutta with ``n`` equal substeps."""
    z = np.array(z0, dtype=float)
    dt = T / n
    for _ in range(n):
        k1 = system(z)
        k2 = system(z + 0.5 * dt * k1)
        k3 = system(z + 0.5 * dt * k2)
        k4 = system(z + dt * k3)
        z = z + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return z


def reference_solve(system: RHS, z0: PhaseState, T: float, tol: float = 1e-13,
                    max_substeps: int = 2 ** 20) -> PhaseState:
    """Flow of ``system`` over time ``T`` to within ``tol`` (max-norm).

    The substep count is doubled until two successive RK4 answers agree
    within ``tol``; the finer answer is returned.
    """
    if not tol >= 1e-13:
        raise ValueError("tol below 1e-13 is not attainable in double precision")
    z = z0.as_vector()
    n = 1
    prev = rk4_integrate(system, z, T, n)
    while True:
        n *= 2
        if n > max_substeps:
            raise DiagnosticsError(f"reference flow did not reach tol={tol} within {max_substeps} substeps")
        cur = rk4_integrate(system, z, T, n)
        if np.max(np.abs(cur - prev)) <= tol:
            return PhaseState.from_vector(cur, z0.t + T)
        prev = cur


def reference_trajectory(system: RHS, z0: PhaseState, times: Sequence[float], tol: float = 1e-13) -> list:
    """Reference states at increasing ``times`` (each segment solved to ``tol``)."""
    out, z, t = [], z0, z0.t
    for t_next in times:
        if t_next < t:
            raise ValueError("times must be nondecreasing")
        z = reference_solve(system, z, t_next - t, tol) if t_next > t else z
        t = t_next
        out.append(z)
    return out


# --- vector fields ----------------------------------------------------------

def conformal_system(H: SeparableHamiltonian, gamma: float) -> RHS:
    """``x' = grad T(p)``, ``p' = -grad f(x) - gamma p`` on flat vectors."""

    def rhs(z):
        n = z.size // 2
        x, p = z[:n], z[n:]
        return np.concatenate([kinetic_gradient(p, H.m, H.c), -H.grad_f(x) - gamma * p])

    return rhs


def _modified_system(problem, phys: PhysicalParams, hess_sign: float) -> RHS:
    if problem.hess is None:
        raise ValueError(f"{problem.name} has no Hessian; the modified equations need one")
    h, g, m = phys.h, phys.gamma, phys.m

    def rhs(z):
        n = z.size // 2
        x, p = z[:n], z[n:]
        gf = problem.grad(x)
        Hp = problem.hess(x) @ p
        xdot = p / m - (h * g / (2 * m)) * p - (h / (2 * m)) * gf
        pdot = -gf - g * p - (h * g / 2) * gf + hess_sign * (h / (2 * m)) * Hp
        return np.concatenate([xdot, pdot])

    return rhs


def nag_modified_system(problem, phys: PhysicalParams) -> RHS:
    """Vector field Nesterov's method follows to second order (Hessian damping ``-h/2m H p``)."""
    return _modified_system(problem, phys, -1.0)


def cm_modified_system(problem, phys: PhysicalParams) -> RHS:
    """Vector field heavy ball follows to second order; conformal Hamiltonian."""
    return _modified_system(problem, phys, +1.0)


def shadow_hamiltonian_value(z: PhaseState, problem, phys: PhysicalParams) -> float:
    """Heavy-ball shadow Hamiltonian

    ``|p|^2/2m + f - (h gamma / 4m)|p|^2 - (h/2m) <grad f, p> + (h gamma / 2) f``.
    """
    h, g, m = phys.h, phys.gamma, phys.m
    x, p = z.x, z.p
    f = float(problem.f(x))
    pp = float(np.dot(p, p))
    return pp / (2 * m) + f - (h * g / (4 * m)) * pp - (h / (2 * m)) * float(np.dot(problem.grad(x), p)) + 0.5 * h * g * f


def conformal_field_fd(energy: Callable[[PhaseState], float], z: PhaseState, gamma: float,
                       fd_step: float = 1e-5) -> Vector:
    """Conformal Hamilton equations of ``energy`` via central differences."""
    v = z.as_vector()
    n = z.dim
    grad = np.empty_like(v)
    for j in range(v.size):
        e = np.zeros_like(v)
        e[j] = fd_step
        grad[j] = (energy(PhaseState.from_vector(v + e)) - energy(PhaseState.from_vector(v - e))) / (2 * fd_step)
    return np.concatenate([grad[n:], -grad[:n] - gamma * z.p])


# --- order estimation ---------------------------------------------------------

@dataclass
class OrderReport:
    hs: np.ndarray
    errors: np.ndarray
    slope: float
    claimed_order: int | None = None
    monotone: bool = True
    label: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def observed_order(self) -> float:
        """One-step errors scale as ``h^(r+1)``, so ``r = slope - 1``."""
        return self.slope - 1.0

    def to_dict(self) -> dict:
        return {
            "label": self.label, "hs": list(map(float, self.hs)), "errors": list(map(float, self.errors)),
            "slope": self.slope, "claimed_order": self.claimed_order, "monotone": self.monotone,
        }


def fit_slope(hs, errors) -> float:
    """Least-squares slope of ``log(error)`` against ``log(h)``."""
    lh, le = np.log(np.asarray(hs, float)), np.log(np.asarray(errors, float))
    return float(np.polyfit(lh, le, 1)[0])


def estimate_order(step: Callable[[PhaseState, float], PhaseState], system: RHS, z0: PhaseState,
                   hs: Sequence[float], claimed_order: int | None = None, tol: float = 1e-13,
                   label: str = "") -> OrderReport:
    """One-step error of ``step(z0, h)`` against the reference flow, for each ``h``.

    ``monotone`` is False when errors fail to decrease with ``h``, which means
    the step sizes are outside the asymptotic regime.
    """
    hs = np.asarray(hs, dtype=float)
    if hs.ndim != 1 or hs.size < 2 or np.any(np.diff(hs) >= 0) or np.any(hs <= 0):
        raise ValueError("hs must be a strictly decreasing sequence of positive step sizes")
    errors = []
    for h in hs:
        num = step(z0, h).as_vector()
        ref = reference_solve(system, z0, h, tol).as_vector()
        errors.append(float(np.linalg.norm(num - ref)))
    errors = np.array(errors)
    if np.any(errors <= 0):
        raise DiagnosticsError("zero one-step error; the slope is undefined")
    monotone = bool(np.all(np.diff(errors) < 0))
    return OrderReport(hs, errors, fit_slope(hs, errors), claimed_order, monotone, label)


DEFAULT_HS = (0.1, 0.05, 0.025, 0.0125, 0.00625)


def shadow_order_check(method: str, z0: PhaseState, problem, gamma: float, m: float = 1.0,
                       hs: Sequence[float] = DEFAULT_HS, modified: bool = True) -> OrderReport:
    """One-step error of heavy ball or Nesterov against its own modified flow.

    The modified vector field depends on ``h``, so the reference is rebuilt
    for each step size. With ``modified=False`` the unperturbed damped
    system is used instead (a control that should show one order less).
    """
    H = SeparableHamiltonian(problem, m=m)
    if method == "cm":
        def step(z, h):
            return conformal_euler_step(H, z, h, gamma)
        build = cm_modified_system
    elif method == "nag":
        def step(z, h):
            return nag_phase_step(z, PhysicalParams(h, gamma, m), problem.grad)
        build = nag_modified_system
    else:
        raise ValueError(f"method must be 'cm' or 'nag', got {method!r}")

    hs = np.asarray(hs, dtype=float)
    errors = []
    for h in hs:
        phys = PhysicalParams(h, gamma, m)
        system = build(problem, phys) if modified else conformal_system(H, gamma)
        num = step(z0, h).as_vector()
        ref = reference_solve(system, z0, h).as_vector()
        errors.append(float(np.linalg.norm(num - ref)))
    errors = np.array(errors)
    label = f"{method} vs {'modified' if modified else 'unmodified'} system"
    return OrderReport(hs, errors, fit_slope(hs, errors), 2 if modified else 1,
                       bool(np.all(np.diff(errors) < 0)), label)
