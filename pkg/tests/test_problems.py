import math

import numpy as np
import pytest
from scipy.optimize import minimize

from confopt.checks import fd_gradient
from confopt.problems import (
    REGISTRY,
    corpus,
    get_problem,
    make_correlated_quadratic,
    make_random_quadratic,
    qing,
    rosenbrock,
)

ALL = sorted(REGISTRY)


def build(name):
    return get_problem(name, 100) if name == "rand_quad" else get_problem(name)


@pytest.mark.parametrize("name", ALL)
def test_gradient_matches_finite_differences(name, rng):
    p = build(name)
    for _ in range(10):
        x = p.sample_domain(rng)
        g = p.grad(x)
        err = np.linalg.norm(fd_gradient(p.f, x) - g) / max(1.0, np.linalg.norm(g))
        assert err <= 1e-5


@pytest.mark.parametrize("name", ALL)
def test_known_minimum_is_stationary(name):
    p = build(name)
    xs, fs = p.known_min
    assert np.linalg.norm(p.grad(xs)) <= 1e-8
    assert abs(p.f(xs) - fs) <= 1e-10


@pytest.mark.parametrize("name", ALL)
def test_hessian_matches_fd_of_gradient(name, rng):
    p = build(name)
    if p.hess is None:
        pytest.skip("no Hessian declared")
    for _ in range(3):
        x = p.sample_domain(rng) / 2
        H = p.hess(x)
        Hfd = np.column_stack([
            (p.grad(x + e) - p.grad(x - e)) / (2 * 1e-6 * (1 + abs(x[i])))
            for i, e in enumerate(np.diag(1e-6 * (1 + np.abs(x))))
        ])
        assert np.allclose(H, Hfd, rtol=1e-5, atol=1e-5 * max(1, np.abs(H).max()))


def test_problem_shapes_and_immutability():
    for p in corpus():
        assert p.init_default.shape == (p.dim,) and p.domain_hint.shape == (p.dim, 2)
        with pytest.raises(ValueError):
            p.init_default[0] = 1.0


def test_corpus_names():
    names = [p.name for p in corpus()]
    assert names == ["rosenbrock", "booth", "matyas", "levi13", "sumsquares", "beale",
                     "chung_reynolds", "quartic", "schwefel", "qing", "zakharov", "camel"]


def test_correlated_quadratic():
    p = make_correlated_quadratic(2, 0.95)
    assert np.allclose(p.params["Q"], [[1, 0.95], [0.95, 1]])
    big = make_correlated_quadratic()
    assert big.dim == 50 and np.all(np.linalg.eigvalsh(big.params["Q"]) > 0)
    assert big.f(np.zeros(50)) == 0 and np.all(big.grad(np.zeros(50)) == 0)
    assert np.var(big.init_default) == pytest.approx(10, rel=0.5)
    assert np.array_equal(big.init_default, make_correlated_quadratic().init_default)
    with pytest.raises(ValueError):
        make_correlated_quadratic(3, 1.0)


def test_random_quadratic(rng):
    p = make_random_quadratic(80, seed=3)
    eig = np.linalg.eigvalsh(p.params["Q"])
    assert eig.min() >= 1e-3 - 1e-12 and eig.max() <= 10 + 1e-12
    assert np.allclose(eig, p.params["eigenvalues"], atol=1e-10)
    assert np.array_equal(p.params["Q"], make_random_quadratic(80, seed=3).params["Q"])
    assert not np.array_equal(p.params["Q"], make_random_quadratic(80, seed=4).params["Q"])
    assert all(p.f(x) >= 0 for x in p.sample_domain(rng, 20))
    with pytest.raises(ValueError):
        make_random_quadratic(5, 1.0, 0.5)


def test_rosenbrock_inits_and_local_minimum():
    p = rosenbrock(100)
    assert np.array_equal(p.init_default[:4], [2, -2, 2, -2])
    assert np.all(rosenbrock(100, init="edge").init_default == 2.048)
    x0 = np.ones(100)
    x0[0] = -1.0
    res = minimize(p.f, x0, jac=p.grad, method="L-BFGS-B", options={"gtol": 1e-12, "maxiter": 10000})
    assert res.x[0] < -0.9 and res.fun == pytest.approx(3.99, abs=0.01)
    with pytest.raises(ValueError):
        rosenbrock(3, init="middle")


def test_qing_minimum():
    p = qing(3)
    assert p.f(np.array([1.0, math.sqrt(2), math.sqrt(3)])) == pytest.approx(0, abs=1e-15)
    assert p.f(np.array([-1.0, -math.sqrt(2), math.sqrt(3)])) == pytest.approx(0, abs=1e-15)


def test_get_problem_dimension_handling():
    assert get_problem("sumsquares", 7).dim == 7
    assert get_problem("booth", 2).dim == 2
    with pytest.raises(ValueError):
        get_problem("booth", 3)
    with pytest.raises(KeyError):
        get_problem("ackley")


def test_caption_values():
    assert get_problem("beale").f(np.array([3.0, 0.5])) == 0
    assert get_problem("booth").f(np.array([1.0, 3.0])) == 0
    assert get_problem("camel").f(np.array([1.0, 1.0])) == pytest.approx(2 - 1.05 + 1 / 6 + 1 + 1)
    assert get_problem("schwefel", 2).f(np.array([2.0, -1.0])) == 1025
