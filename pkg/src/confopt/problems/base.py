from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np


@dataclass(frozen=True, eq=False)
class Problem:
    """Objective contract: value, analytic gradient, optional Hessian.

    ``known_min`` is ``(x_star, f_star)`` when a minimiser is known.
    ``domain_hint`` holds one ``(lo, hi)`` row per coordinate.
    """

    name: str
    dim: int
    f: Callable[[np.ndarray], float]
    grad: Callable[[np.ndarray], np.ndarray]
    init_default: np.ndarray
    domain_hint: np.ndarray
    hess: Optional[Callable[[np.ndarray], np.ndarray]] = None
    known_min: Optional[tuple] = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        x0 = np.array(self.init_default, dtype=float)
        dom = np.array(self.domain_hint, dtype=float)
        if dom.shape == (2,):
            dom = np.tile(dom, (self.dim, 1))
        if x0.shape != (self.dim,) or dom.shape != (self.dim, 2):
            raise ValueError(f"{self.name}: inconsistent dimensions")
        x0.setflags(write=False)
        dom.setflags(write=False)
        object.__setattr__(self, "init_default", x0)
        object.__setattr__(self, "domain_hint", dom)
        if self.known_min is not None:
            xs, fs = self.known_min
            xs = np.array(xs, dtype=float)
            xs.setflags(write=False)
            object.__setattr__(self, "known_min", (xs, float(fs)))

    def sample_domain(self, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
        lo, hi = self.domain_hint[:, 0], self.domain_hint[:, 1]
        shape = (self.dim,) if size is None else (size, self.dim)
        return lo + (hi - lo) * rng.random(shape)

    def __repr__(self):
        return f"Problem({self.name!r}, dim={self.dim})"
