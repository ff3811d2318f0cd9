"""Linear stability of heavy ball, Nesterov and (classical, alpha=1) RGD.

On ``f(x) = lam x^2 / 2`` one step of each method is a linear map
``z_{k+1} = T z_k`` on ``z = (x, p)``; the method is stable iff the spectral
radius of ``T`` is at most one. Thresholds are expressed with the momentum
factor ``mu = exp(-gamma h)`` held fixed.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .core import ParameterError

STABILITY_METHODS = ("cm", "nag", "rgd")


class StabilityError(RuntimeError):
    pass


@dataclass(frozen=True)
class StabilityQuery:
    method: str
    mu: float
    m: float = 1.0
    lam: float = 1.0

    def __post_init__(self):
        if self.method not in STABILITY_METHODS:
            raise ParameterError(f"method must be one of {STABILITY_METHODS}, got {self.method!r}")
        if not 0 < self.mu < 1:
            raise ParameterError(f"mu must lie in (0, 1), got {self.mu}")
        if not (self.m > 0 and self.lam > 0):
            raise ParameterError("m and lam must be > 0")


def transition_matrix(method: str, h: float, gamma: float, m: float = 1.0, lam: float = 1.0) -> np.ndarray:
    a = h * h * lam / m
    mu = math.exp(-gamma * h)
    if method == "cm":
        return np.array([[1 - a, (h / m) * mu], [-h * lam, mu]])
    if method == "nag":
        return np.array([[1 - a, (h / m) * mu * (1 - a)], [-h * lam, mu * (1 - a)]])
    if method == "rgd":
        b = 0.5 * a
        s = math.exp(-0.5 * gamma * h)
        return np.array([[1 - b, h / (2 * m) * s * (2 - b)], [-h * lam * s, mu * (1 - b)]])
    raise ParameterError(f"method must be one of {STABILITY_METHODS}, got {method!r}")


def eigenvalues_2x2(T) -> tuple[complex, complex]:
    """Roots of ``z^2 - tr z + det``, ordered by real part then imaginary part."""
    T = np.asarray(T, dtype=float)
    if T.shape != (2, 2):
        raise ValueError("expected a 2x2 matrix")
    tr = T[0, 0] + T[1, 1]
    det = T[0, 0] * T[1, 1] - T[0, 1] * T[1, 0]
    root = cmath.sqrt(0.25 * tr * tr - det)
    e1, e2 = 0.5 * tr - root, 0.5 * tr + root
    return (e1, e2) if (e1.real, e1.imag) <= (e2.real, e2.imag) else (e2, e1)


def spectral_radius(T) -> float:
    return max(abs(e) for e in eigenvalues_2x2(T))


def analytic_threshold(q: StabilityQuery) -> float:
    """Largest stable step size as given by the published closed forms.

    These do not coincide with the thresholds of :func:`transition_matrix`
    except as ``mu -> 1``; :func:`closed_form_threshold` solves the matrices
    exactly.
    """
    mu, m, lam = q.mu, q.m, q.lam
    s = 1 + mu + mu ** 2 + mu ** 3
    if q.method == "cm":
        return math.sqrt(m * s) / (mu * math.sqrt(lam))
    if q.method == "nag":
        return math.sqrt(m * s) / math.sqrt(mu * lam * (1 + mu + mu ** 2))
    return math.sqrt(2 * m * s) / math.sqrt(mu * lam * (1 + mu))


def closed_form_threshold(q: StabilityQuery) -> float:
    """Exact threshold of the transition matrices at fixed ``mu``.

    Instability sets in when the leftmost real eigenvalue reaches -1, i.e.
    ``1 + tr T + det T = 0``:
    heavy ball ``h^2 lam/m = 2(1+mu)``, Nesterov ``h^2 lam/m = 2(1+mu)/(1+2mu)``,
    RGD ``h^2 lam/m = 4``.
    """
    mu, m, lam = q.mu, q.m, q.lam
    if q.method == "cm":
        return math.sqrt(2 * m * (1 + mu) / lam)
    if q.method == "nag":
        return math.sqrt(2 * m * (1 + mu) / (lam * (1 + 2 * mu)))
    return 2.0 * math.sqrt(m / lam)


def _stable(method, h, mu, m, lam) -> bool:
    gamma = -math.log(mu) / h
    return spectral_radius(transition_matrix(method, h, gamma, m, lam)) <= 1.0


def empirical_threshold(method: str, mu: float, m: float = 1.0, lam: float = 1.0, tol: float = 1e-10) -> float:
    """Bisection on ``rho(T(h)) <= 1`` with ``gamma = -ln(mu)/h`` so ``mu`` stays fixed.

    The bracket is ``[1e-6, 10 h_cm]`` with ``h_cm`` the published heavy-ball
    threshold. Returns the stable end of the final bracket.
    """
    if not tol > 0:
        raise ValueError("tol must be > 0")
    q = StabilityQuery(method, mu, m, lam)
    lo = 1e-6
    hi = 10.0 * analytic_threshold(StabilityQuery("cm", mu, m, lam))
    if not _stable(q.method, lo, mu, m, lam) or _stable(q.method, hi, mu, m, lam):
        raise StabilityError(f"bracket [{lo}, {hi}] does not straddle the threshold for {method}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _stable(q.method, mid, mu, m, lam):
            lo = mid
        else:
            hi = mid
    return lo


def eigen_locus(method: str, hs, gamma: float = 1.0, m: float = 1.0, lam: float = 1.0) -> list[dict]:
    """Eigenvalues and spectral radius along a grid of step sizes at fixed ``gamma``."""
    rows = []
    for h in hs:
        e1, e2 = eigenvalues_2x2(transition_matrix(method, h, gamma, m, lam))
        rows.append({"method": method, "h": float(h), "re1": e1.real, "im1": e1.imag,
                     "re2": e2.real, "im2": e2.imag, "rho": max(abs(e1), abs(e2))})
    return rows


def threshold_table(mus, methods=STABILITY_METHODS, m: float = 1.0, lam: float = 1.0, tol: float = 1e-10) -> list[dict]:
    rows = []
    for mu in mus:
        for method in methods:
            q = StabilityQuery(method, mu, m, lam)
            rows.append({"mu": float(mu), "method": method, "h_analytic": analytic_threshold(q),
                         "h_empirical": empirical_threshold(method, mu, m, lam, tol)})
    return rows
