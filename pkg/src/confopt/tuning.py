"""Seeded random search over optimizer hyperparameters."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .core import OptimizerParams, ParameterError
from .io import write_csv
from .optimizers import METHOD_PARAMS, StopCriteria, run

PARAM_NAMES = ("epsilon", "mu", "delta", "alpha")


@dataclass(frozen=True)
class SearchSpace:
    eps_range: tuple = (1e-6, 1.0)
    mu_range: tuple = (0.5, 0.9999)
    delta_range: tuple = (1e-8, 1e4)
    delta_zero_prob: float = 0.1
    alpha_range: tuple = (0.0, 1.0)

    def __post_init__(self):
        for name in ("eps_range", "mu_range", "delta_range", "alpha_range"):
            lo, hi = getattr(self, name)
            if not lo < hi:
                raise ParameterError(f"{name} must be ordered, got ({lo}, {hi})")
        if not (self.eps_range[0] > 0 and self.delta_range[0] > 0):
            raise ParameterError("log-uniform ranges need positive bounds")
        if not (0 < self.mu_range[0] and self.mu_range[1] < 1):
            raise ParameterError("mu range must lie inside (0, 1)")
        if not (0 <= self.alpha_range[0] and self.alpha_range[1] <= 1):
            raise ParameterError("alpha range must lie inside [0, 1]")
        if not 0 <= self.delta_zero_prob <= 1:
            raise ParameterError("delta_zero_prob must lie in [0, 1]")

    def log_scaled(self, param: str) -> bool:
        return param in ("epsilon", "delta")

    def bounds(self, param: str) -> tuple:
        return {"epsilon": self.eps_range, "mu": self.mu_range,
                "delta": self.delta_range, "alpha": self.alpha_range}[param]

    def sample(self, rng: np.random.Generator, method: str = "rgd") -> OptimizerParams:
        """Draw one configuration.

        All four values are drawn in a fixed order whatever the method, so
        trial ``i`` of every method sees the same ``epsilon`` and ``mu``.
        Parameters the method does not read are reset to their defaults.
        """
        u = rng.random(5)
        eps = _log_uniform(u[0], *self.eps_range)
        mu = self.mu_range[0] + u[1] * (self.mu_range[1] - self.mu_range[0])
        delta = 0.0 if u[2] < self.delta_zero_prob else _log_uniform(u[3], *self.delta_range)
        alpha = self.alpha_range[0] + u[4] * (self.alpha_range[1] - self.alpha_range[0])
        used = METHOD_PARAMS.get(method, PARAM_NAMES)
        return OptimizerParams(
            epsilon=eps,
            mu=mu,
            delta=delta if "delta" in used else 0.0,
            alpha=alpha if "alpha" in used else 1.0,
        )


def _log_uniform(u, lo, hi):
    return float(math.exp(math.log(lo) + u * (math.log(hi) - math.log(lo))))


@dataclass(frozen=True)
class TrialRecord:
    params: OptimizerParams
    score: float
    diverged: bool
    seed: int
    index: int = 0
    method: str = ""

    def __post_init__(self):
        if math.isfinite(self.score) == self.diverged:
            raise ValueError("a trial is either diverged (score inf) or has a finite score")


class SearchResult(NamedTuple):
    best: TrialRecord
    trials: list

    @property
    def all_diverged(self) -> bool:
        return self.best.diverged


def trial_seed(seed: int, index: int) -> int:
    """Independent integer seed for trial ``index`` of a search seeded with ``seed``."""
    return int(np.random.SeedSequence([seed, index]).generate_state(1, np.uint64)[0])


def search(objective: Callable[[OptimizerParams], float], method: str, budget: int, seed: int,
           space: SearchSpace | None = None) -> SearchResult:
    """Random search on a scalar ``objective`` (smaller is better, non-finite means diverged)."""
    if budget < 1:
        raise ValueError(f"budget must be >= 1, got {budget}")
    space = space or SearchSpace()
    trials = []
    for i in range(budget):
        s = trial_seed(seed, i)
        params = space.sample(np.random.default_rng(s), method)
        score = float(objective(params))
        bad = not math.isfinite(score)
        trials.append(TrialRecord(params, math.inf if bad else score, bad, s, i, method))
    ok = [t for t in trials if not t.diverged]
    best = min(ok, key=lambda t: (t.score, t.index)) if ok else trials[0]
    return SearchResult(best, trials)


def random_search(problem, method: str, budget: int, iters_per_trial: int, seed: int,
                  space: SearchSpace | None = None, init=None) -> SearchResult:
    """Score each trial by the smallest ``f`` reached in ``iters_per_trial`` steps."""
    stop = StopCriteria(max_iters=iters_per_trial)

    def objective(params):
        tr = run(method, problem, params, init=init, stop=stop, record_states=False)
        return math.inf if tr.diverged else tr.best_f

    return search(objective, method, budget, seed, space)


def matcomp_search(inst, method: str, budget: int, iters: int, seed: int,
                   space: SearchSpace | None = None, init_seed: int = 0) -> SearchResult:
    """Random search for alternating minimization, scored by the smallest loss."""
    from .problems.matcomp import alternating_minimize

    def objective(params):
        tr = alternating_minimize(inst, method, params, iters, init_seed=init_seed)
        return math.inf if tr.diverged else tr.best_f

    return search(objective, method, budget, seed, space)


@dataclass(frozen=True)
class Histogram:
    param: str
    edges: np.ndarray
    counts: np.ndarray
    empty: bool
    log_scale: bool
    zero_count: int = 0  # delta == 0 draws, kept out of the log-spaced bins


def histogram(trials, param: str, bins: int = 20, space: SearchSpace | None = None) -> Histogram:
    """Bin counts of ``param`` over converged trials on fixed, space-wide edges.

    Log-uniform parameters are binned in ``log10``; the edges are reported in
    those units.
    """
    if bins < 2:
        raise ValueError(f"bins must be >= 2, got {bins}")
    if param not in PARAM_NAMES:
        raise ValueError(f"unknown parameter {param!r}")
    space = space or SearchSpace()
    log = space.log_scaled(param)
    lo, hi = space.bounds(param)
    if log:
        lo, hi = math.log10(lo), math.log10(hi)
    edges = np.linspace(lo, hi, bins + 1)
    values = np.array([getattr(t.params, param) for t in trials if not t.diverged], dtype=float)
    zeros = 0
    if log:
        zeros = int(np.sum(values == 0))
        values = np.log10(values[values > 0])
    counts, _ = np.histogram(np.clip(values, lo, hi), bins=edges)
    return Histogram(param, edges, counts, empty=(counts.sum() + zeros) == 0,
                     log_scale=log, zero_count=zeros)


TRIAL_FIELDS = ("method", "index", "seed", *PARAM_NAMES, "score", "diverged")


def trial_rows(trials) -> list[dict]:
    return [{"method": t.method, "index": t.index, "seed": t.seed,
             "epsilon": t.params.epsilon, "mu": t.params.mu, "delta": t.params.delta,
             "alpha": t.params.alpha, "score": t.score, "diverged": t.diverged}
            for t in trials]


def write_trials_csv(path, trials) -> None:
    write_csv(path, TRIAL_FIELDS, trial_rows(trials))
