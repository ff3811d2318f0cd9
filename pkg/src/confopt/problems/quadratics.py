"""Quadratic test problems ``f(x) = x^T Q x / 2``."""
from __future__ import annotations

import numpy as np

from .base import Problem


def quadratic(Q, name: str = "quadratic", init=None, domain=(-10.0, 10.0), **params) -> Problem:
    """Wrap a symmetric matrix as a :class:`Problem` with exact Hessian."""
    Q = np.array(Q, dtype=float)
    if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
        raise ValueError("Q must be square")
    Q = 0.5 * (Q + Q.T)
    Q.setflags(write=False)
    n = Q.shape[0]
    return Problem(
        name=name,
        dim=n,
        f=lambda x: 0.5 * float(x @ (Q @ x)),
        grad=lambda x: Q @ x,
        hess=lambda x: Q,
        init_default=np.ones(n) if init is None else init,
        domain_hint=domain,
        known_min=(np.zeros(n), 0.0),
        params=dict(params, Q=Q),
    )


def _gaussian_init(n, seed, variance=10.0):
    # N(0, 10) read as variance 10, matching the N(mean, variance) reading of N(1, 2)
    return np.random.default_rng(seed).normal(0.0, np.sqrt(variance), n)


def make_correlated_quadratic(n: int = 50, rho: float = 0.95, seed: int = 0) -> Problem:
    """``Q_ij = rho^|i-j|`` (Kac-Murdock-Szego matrix, positive definite for |rho| < 1)."""
    if not 0 < rho < 1:
        raise ValueError(f"rho must lie in (0, 1), got {rho}")
    idx = np.arange(n)
    Q = rho ** np.abs(idx[:, None] - idx[None, :])
    return quadratic(Q, name="corr_quad", init=_gaussian_init(n, seed), n=n, rho=rho, seed=seed)


def make_random_quadratic(n: int = 500, eig_lo: float = 1e-3, eig_hi: float = 10.0, seed: int = 0) -> Problem:
    """``Q = V^T D V`` with a seeded random orthogonal ``V`` and uniform spectrum."""
    if not 0 < eig_lo < eig_hi:
        raise ValueError("need 0 < eig_lo < eig_hi")
    rng = np.random.default_rng(seed)
    V, R = np.linalg.qr(rng.standard_normal((n, n)))
    V = V * np.sign(np.diag(R))  # Haar-distributed orthogonal factor
    D = rng.uniform(eig_lo, eig_hi, n)
    Q = V.T @ (D[:, None] * V)
    return quadratic(
        Q, name="rand_quad", init=_gaussian_init(n, seed + 1),
        n=n, eig_lo=eig_lo, eig_hi=eig_hi, seed=seed, eigenvalues=np.sort(D),
    )
