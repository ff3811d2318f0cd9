"""Benchmark objectives with analytic gradients.

Definitions, minima, initial points and domains follow the usual benchmark
conventions; Schwefel here is the ``sum x_i^10`` variant.
"""
from __future__ import annotations

import numpy as np

from .base import Problem


def rosenbrock(n: int = 100, init: str = "alternating") -> Problem:
    """``sum 100 (x_{i+1} - x_i^2)^2 + (1 - x_i)^2``.

    ``init="alternating"`` starts at ``(2, -2, 2, ...)``; ``init="edge"``
    starts at the corner ``(2.048, ..., 2.048)`` of the usual domain.
    """

    def f(x):
        a, b = x[:-1], x[1:]
        return float(np.sum(100.0 * (b - a * a) ** 2 + (1.0 - a) ** 2))

    def grad(x):
        a, b = x[:-1], x[1:]
        r = b - a * a
        g = np.zeros_like(x)
        g[:-1] = -400.0 * a * r - 2.0 * (1.0 - a)
        g[1:] += 200.0 * r
        return g

    def hess(x):
        H = np.zeros((n, n))
        a = x[:-1]
        d = np.zeros(n)
        d[:-1] = 1200.0 * a * a - 400.0 * x[1:] + 2.0
        d[1:] += 200.0
        H[np.diag_indices(n)] = d
        off = -400.0 * a
        H[np.arange(n - 1), np.arange(1, n)] = off
        H[np.arange(1, n), np.arange(n - 1)] = off
        return H

    if init == "alternating":
        x0 = np.where(np.arange(n) % 2 == 0, 2.0, -2.0)
    elif init == "edge":
        x0 = np.full(n, 2.048)
    else:
        raise ValueError(f"unknown init {init!r}")
    return Problem("rosenbrock", n, f, grad, x0, (-2.048, 2.048), hess=hess,
                   known_min=(np.ones(n), 0.0), params={"n": n, "init": init})


def booth() -> Problem:
    def f(x):
        return float((x[0] + 2 * x[1] - 7) ** 2 + (2 * x[0] + x[1] - 5) ** 2)

    def grad(x):
        a = x[0] + 2 * x[1] - 7
        b = 2 * x[0] + x[1] - 5
        return np.array([2 * a + 4 * b, 4 * a + 2 * b])

    return Problem("booth", 2, f, grad, [10.0, 10.0], (-10.0, 10.0),
                   hess=lambda x: np.array([[10.0, 8.0], [8.0, 10.0]]), known_min=([1.0, 3.0], 0.0))


def matyas() -> Problem:
    H = np.array([[0.52, -0.48], [-0.48, 0.52]])
    return Problem(
        "matyas", 2,
        f=lambda x: float(0.26 * (x[0] ** 2 + x[1] ** 2) - 0.48 * x[0] * x[1]),
        grad=lambda x: H @ x,
        init_default=[10.0, -7.0], domain_hint=(-10.0, 10.0),
        hess=lambda x: H, known_min=([0.0, 0.0], 0.0),
    )


def levi13() -> Problem:
    """Levi function no. 13 (multimodal, minimum at (1, 1))."""
    tp = 3 * np.pi

    def f(x):
        u, w = x
        return float(np.sin(tp * u) ** 2 + (u - 1) ** 2 * (1 + np.sin(tp * w) ** 2)
                     + (w - 1) ** 2 * (1 + np.sin(2 * np.pi * w) ** 2))

    def grad(x):
        u, w = x
        gu = tp * np.sin(2 * tp * u) + 2 * (u - 1) * (1 + np.sin(tp * w) ** 2)
        gw = ((u - 1) ** 2 * tp * np.sin(2 * tp * w)
              + 2 * (w - 1) * (1 + np.sin(2 * np.pi * w) ** 2)
              + (w - 1) ** 2 * 2 * np.pi * np.sin(4 * np.pi * w))
        return np.array([gu, gw])

    return Problem("levi13", 2, f, grad, [10.0, -10.0], (-10.0, 10.0), known_min=([1.0, 1.0], 0.0))


def sum_squares(n: int = 100) -> Problem:
    w = np.arange(1, n + 1, dtype=float)
    return Problem(
        "sumsquares", n,
        f=lambda x: float(np.dot(w, x * x)),
        grad=lambda x: 2.0 * w * x,
        init_default=np.full(n, 10.0), domain_hint=(-10.0, 10.0),
        hess=lambda x: np.diag(2.0 * w), known_min=(np.zeros(n), 0.0), params={"n": n},
    )


def beale() -> Problem:
    c = np.array([1.5, 2.25, 2.625])

    def terms(x):
        u, w = x
        pw = np.array([w, w * w, w ** 3])
        return c - u + u * pw, pw

    def f(x):
        r, _ = terms(x)
        return float(np.dot(r, r))

    def grad(x):
        u, w = x
        r, pw = terms(x)
        du = pw - 1.0
        dw = u * np.array([1.0, 2 * w, 3 * w * w])
        return np.array([2 * np.dot(r, du), 2 * np.dot(r, dw)])

    return Problem("beale", 2, f, grad, [-3.0, -3.0], (-4.5, 4.5), known_min=([3.0, 0.5], 0.0))


def chung_reynolds(n: int = 50) -> Problem:
    def f(x):
        return float(np.dot(x, x) ** 2)

    def grad(x):
        return 4.0 * np.dot(x, x) * x

    return Problem("chung_reynolds", n, f, grad, np.full(n, 50.0), (-100.0, 100.0),
                   known_min=(np.zeros(n), 0.0), params={"n": n})


def quartic(n: int = 50) -> Problem:
    w = np.arange(1, n + 1, dtype=float)
    return Problem(
        "quartic", n,
        f=lambda x: float(np.dot(w, x ** 4)),
        grad=lambda x: 4.0 * w * x ** 3,
        init_default=np.full(n, 2.0), domain_hint=(-1.28, 1.28),
        known_min=(np.zeros(n), 0.0), params={"n": n},
    )


def schwefel(n: int = 20) -> Problem:
    """``sum x_i^10``: polynomial growth steeper than any quadratic."""
    return Problem(
        "schwefel", n,
        f=lambda x: float(np.sum(x ** 10)),
        grad=lambda x: 10.0 * x ** 9,
        init_default=np.full(n, 2.0), domain_hint=(-10.0, 10.0),
        known_min=(np.zeros(n), 0.0), params={"n": n},
    )


def qing(n: int = 100) -> Problem:
    i = np.arange(1, n + 1, dtype=float)
    return Problem(
        "qing", n,
        f=lambda x: float(np.sum((x * x - i) ** 2)),
        grad=lambda x: 4.0 * x * (x * x - i),
        init_default=np.full(n, 50.0), domain_hint=(-500.0, 500.0),
        known_min=(np.sqrt(i), 0.0), params={"n": n},
    )


def zakharov(n: int = 5) -> Problem:
    i = np.arange(1, n + 1, dtype=float)

    def f(x):
        s = 0.5 * np.dot(i, x)
        return float(np.dot(x, x) + s ** 2 + s ** 4)

    def grad(x):
        s = 0.5 * np.dot(i, x)
        return 2.0 * x + (s + 2.0 * s ** 3) * i

    return Problem("zakharov", n, f, grad, np.ones(n), (-5.0, 10.0),
                   known_min=(np.zeros(n), 0.0), params={"n": n})


def three_hump_camel() -> Problem:
    def f(x):
        u, w = x
        return float(2 * u ** 2 - 1.05 * u ** 4 + u ** 6 / 6 + u * w + w ** 2)

    def grad(x):
        u, w = x
        return np.array([4 * u - 4.2 * u ** 3 + u ** 5 + w, u + 2 * w])

    return Problem("camel", 2, f, grad, [5.0, 5.0], (-5.0, 5.0), known_min=([0.0, 0.0], 0.0))
