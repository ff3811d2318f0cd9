"""Benchmark corpus, quadratic problems and matrix completion."""
from __future__ import annotations

from .base import Problem
from .functions import (
    beale,
    booth,
    chung_reynolds,
    levi13,
    matyas,
    qing,
    quartic,
    rosenbrock,
    schwefel,
    sum_squares,
    three_hump_camel,
    zakharov,
)
from .matcomp import MatCompInstance, alternating_minimize, matcomp_generate, matcomp_loss_grad
from .quadratics import make_correlated_quadratic, make_random_quadratic, quadratic

# name -> (factory, keyword accepted as the dimension, if any)
REGISTRY = {
    "corr_quad": (make_correlated_quadratic, "n"),
    "rand_quad": (make_random_quadratic, "n"),
    "rosenbrock": (rosenbrock, "n"),
    "booth": (booth, None),
    "matyas": (matyas, None),
    "levi13": (levi13, None),
    "sumsquares": (sum_squares, "n"),
    "beale": (beale, None),
    "chung_reynolds": (chung_reynolds, "n"),
    "quartic": (quartic, "n"),
    "schwefel": (schwefel, "n"),
    "qing": (qing, "n"),
    "zakharov": (zakharov, "n"),
    "camel": (three_hump_camel, None),
}


def corpus() -> list[Problem]:
    """The non-quadratic benchmark functions at their default sizes."""
    names = ["rosenbrock", "booth", "matyas", "levi13", "sumsquares", "beale",
             "chung_reynolds", "quartic", "schwefel", "qing", "zakharov", "camel"]
    return [REGISTRY[name][0]() for name in names]


def get_problem(name: str, dim: int | None = None, **kwargs) -> Problem:
    """Build a registered problem; ``dim`` is forwarded to dimension-generic ones."""
    try:
        factory, dim_kw = REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown problem {name!r}; choose from {sorted(REGISTRY)}") from None
    if dim is not None:
        if dim_kw is None:
            if dim != 2:
                raise ValueError(f"{name} is two-dimensional")
        else:
            kwargs[dim_kw] = dim
    return factory(**kwargs)


__all__ = [
    "Problem", "MatCompInstance", "REGISTRY", "corpus", "get_problem", "quadratic",
    "make_correlated_quadratic", "make_random_quadratic", "matcomp_generate",
    "matcomp_loss_grad", "alternating_minimize", "rosenbrock", "booth", "matyas",
    "levi13", "sum_squares", "beale", "chung_reynolds", "quartic", "schwefel", "qing",
    "zakharov", "three_hump_camel",
]
