"""Low-rank matrix completion solved by alternating momentum steps."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from ..core import DIVERGENCE_BOUND, AlgState, OptimizerParams, Trace
from ..optimizers import get_stepper


@dataclass(frozen=True, eq=False)
class MatCompInstance:
    """Rank-``r`` ground truth ``M = R S^T`` observed on a random support ``mask``."""

    M: np.ndarray
    mask: np.ndarray
    n: int
    r: int
    s: float
    seed: int

    @property
    def observed(self) -> int:
        return int(self.mask.sum())

    @property
    def degrees_of_freedom(self) -> int:
        return self.r * (2 * self.n - self.r)

    @property
    def hardness(self) -> float:
        """Degrees of freedom per observation, ``r(2n - r) / p``."""
        return self.degrees_of_freedom / self.observed

    def describe(self) -> dict:
        return {"n": self.n, "r": self.r, "s": self.s, "seed": self.seed}


def matcomp_generate(n: int = 100, r: int = 5, s: float = 0.3, seed: int = 0) -> MatCompInstance:
    """Draw ``R, S`` with iid N(1, 2) entries (mean 1, variance 2) and a uniform support."""
    if not 0 < r < n:
        raise ValueError(f"need 0 < r < n, got r={r}, n={n}")
    if not 0 < s < 1:
        raise ValueError(f"sampling ratio must lie in (0, 1), got {s}")
    rng = np.random.default_rng(seed)
    R = rng.normal(1.0, math.sqrt(2.0), (n, r))
    S = rng.normal(1.0, math.sqrt(2.0), (n, r))
    M = R @ S.T
    p = int(round(s * n * n))
    mask = np.zeros(n * n, dtype=bool)
    mask[rng.choice(n * n, size=p, replace=False)] = True
    mask = mask.reshape(n, n)
    M.setflags(write=False)
    mask.setflags(write=False)
    return MatCompInstance(M=M, mask=mask, n=n, r=r, s=s, seed=seed)


def matcomp_loss_grad(inst: MatCompInstance, U, V):
    """``|P(M - U V^T)|_F^2`` and its gradients in ``U`` and ``V``."""
    U = np.asarray(U, dtype=float)
    V = np.asarray(V, dtype=float)
    if U.shape != (inst.n, inst.r) or V.shape != (inst.n, inst.r):
        raise ValueError(f"U and V must be {inst.n}x{inst.r}, got {U.shape} and {V.shape}")
    E = np.where(inst.mask, inst.M - U @ V.T, 0.0)
    return float(np.sum(E * E)), -2.0 * E @ V, -2.0 * E.T @ U


def alternating_minimize(inst: MatCompInstance, method: str, params: OptimizerParams, iters: int,
                         U0=None, V0=None, init_seed: int = 0,
                         divergence_bound: float = DIVERGENCE_BOUND) -> Trace:
    """Each outer iteration takes one step on ``U`` (``V`` fixed) then one on ``V``.

    ``U`` and ``V`` keep their own velocities across outer iterations. The
    trace stores ``x = [vec U, vec V]`` and ``v`` likewise, with the loss as
    ``f``. Missing initial factors are drawn from a standard normal.
    """
    step = get_stepper(method)
    n, r = inst.n, inst.r
    rng = np.random.default_rng(init_seed)
    U = rng.standard_normal((n, r)) if U0 is None else np.array(U0, dtype=float)
    V = rng.standard_normal((n, r)) if V0 is None else np.array(V0, dtype=float)
    su = AlgState(U.ravel())
    sv = AlgState(V.ravel())
    trace = Trace()
    t0 = time.perf_counter()

    def record(k):
        loss, gU, gV = matcomp_loss_grad(inst, su.x.reshape(n, r), sv.x.reshape(n, r))
        trace.states.append(AlgState(np.concatenate([su.x, sv.x]), np.concatenate([su.v, sv.v]), k))
        trace.fvals.append(loss)
        trace.gradnorms.append(float(math.sqrt(np.sum(gU * gU) + np.sum(gV * gV))))
        return (su.diverged(divergence_bound) or sv.diverged(divergence_bound)
                or not (loss <= divergence_bound))

    with np.errstate(over="ignore", invalid="ignore"):
        bad = record(0)
        for k in range(1, iters + 1):
            if bad:
                break
            Vm = sv.x.reshape(n, r)
            su = step(su, params, lambda u: matcomp_loss_grad(inst, u.reshape(n, r), Vm)[1].ravel())
            Um = su.x.reshape(n, r)
            sv = step(sv, params, lambda v: matcomp_loss_grad(inst, Um, v.reshape(n, r))[2].ravel())
            bad = record(k)
    trace.diverged = bad
    trace.reason = "diverged" if bad else "max_iters"
    trace.wallclock = time.perf_counter() - t0
    return trace
