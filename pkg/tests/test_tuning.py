import math

import numpy as np
import pytest

from confopt.core import OptimizerParams, ParameterError
from confopt.problems import get_problem, make_correlated_quadratic
from confopt.problems.matcomp import matcomp_generate
from confopt.tuning import (
    SearchSpace,
    TrialRecord,
    histogram,
    matcomp_search,
    random_search,
    search,
    trial_seed,
    write_trials_csv,
)


def test_space_samples_valid_and_in_range():
    space = SearchSpace()
    rng = np.random.default_rng(0)
    samples = [space.sample(rng) for _ in range(5000)]
    eps = np.array([s.epsilon for s in samples])
    mu = np.array([s.mu for s in samples])
    delta = np.array([s.delta for s in samples])
    alpha = np.array([s.alpha for s in samples])
    assert eps.min() >= 1e-6 and eps.max() <= 1
    assert mu.min() >= 0.5 and mu.max() <= 0.9999
    assert alpha.min() >= 0 and alpha.max() <= 1
    nz = delta[delta > 0]
    assert nz.min() >= 1e-8 and nz.max() <= 1e4
    assert np.mean(delta == 0) == pytest.approx(0.1, abs=0.015)
    # log-uniform: log10(eps) roughly uniform on [-6, 0]
    assert np.mean(np.log10(eps) < -3) == pytest.approx(0.5, abs=0.03)


def test_space_validation():
    with pytest.raises(ParameterError):
        SearchSpace(eps_range=(1.0, 1e-6))
    with pytest.raises(ParameterError):
        SearchSpace(mu_range=(0.5, 1.0))
    with pytest.raises(ParameterError):
        SearchSpace(delta_zero_prob=1.5)


def test_common_random_numbers_across_methods():
    rng_a, rng_b = np.random.default_rng(9), np.random.default_rng(9)
    a = SearchSpace().sample(rng_a, "cm")
    b = SearchSpace().sample(rng_b, "rgd")
    assert a.epsilon == b.epsilon and a.mu == b.mu
    assert a.delta == 0.0 and a.alpha == 1.0


def test_trial_record_invariant():
    p = OptimizerParams(0.1, 0.5)
    with pytest.raises(ValueError):
        TrialRecord(p, math.inf, False, 0)
    with pytest.raises(ValueError):
        TrialRecord(p, 1.0, True, 0)


def test_budget_one_and_validation():
    prob = get_problem("booth")
    res = random_search(prob, "cm", 1, 20, seed=0)
    assert len(res.trials) == 1 and res.best is res.trials[0]
    with pytest.raises(ValueError):
        random_search(prob, "cm", 0, 20, seed=0)


def test_determinism_and_per_trial_seeds():
    prob = make_correlated_quadratic(10)
    a = random_search(prob, "rgd", 15, 50, seed=7)
    b = random_search(prob, "rgd", 15, 50, seed=7)
    assert a.trials == b.trials
    assert [t.seed for t in a.trials] == [trial_seed(7, i) for i in range(15)]
    assert len({t.seed for t in a.trials}) == 15
    c = random_search(prob, "rgd", 15, 50, seed=8)
    assert a.trials != c.trials


def test_diverged_trials_never_win():
    prob = make_correlated_quadratic(10)
    res = random_search(prob, "cm", 40, 100, seed=1)
    assert any(t.diverged for t in res.trials)
    finite = [t.score for t in res.trials if not t.diverged]
    assert res.best.score == min(finite) and not res.all_diverged


def test_all_diverged_flagged():
    res = search(lambda p: math.nan, "cm", 5, seed=0)
    assert res.all_diverged and res.best.diverged and res.best.score == math.inf
    h = histogram(res.trials, "epsilon", 10)
    assert h.empty and h.counts.sum() == 0


def test_histogram_single_converged():
    t = TrialRecord(OptimizerParams(0.01, 0.7, 0.0, 0.3), 1.0, False, 0)
    h = histogram([t], "alpha", 5)
    assert np.count_nonzero(h.counts) == 1 and not h.empty and not h.log_scale
    h = histogram([t], "delta", 5)
    assert h.zero_count == 1 and h.counts.sum() == 0 and not h.empty
    h = histogram([t], "epsilon", 6)
    assert h.log_scale and h.edges[0] == -6 and h.edges[-1] == 0 and h.counts[4] == 1
    with pytest.raises(ValueError):
        histogram([t], "alpha", 1)
    with pytest.raises(ValueError):
        histogram([t], "gamma", 4)


def test_best_trial_improves_on_start():
    prob = make_correlated_quadratic()
    f0 = prob.f(prob.init_default)
    for method in ("cm", "nag", "rgd"):
        res = random_search(prob, method, 30, 100, seed=0)
        assert res.best.score < f0


@pytest.mark.benchmark
def test_rgd_best_not_worse_than_cm_on_correlated_quadratic():
    prob = make_correlated_quadratic()
    cm = random_search(prob, "cm", 200, 500, seed=0)
    rgd = random_search(prob, "rgd", 200, 500, seed=0)
    print(f"corr_quad budget 200 x 500: cm {cm.best.score:.3g}, rgd {rgd.best.score:.3g}")
    assert rgd.best.score <= cm.best.score


def test_matcomp_search_small():
    inst = matcomp_generate(20, 2, 0.4, seed=0)
    res = matcomp_search(inst, "rgd", 5, 20, seed=0)
    assert len(res.trials) == 5 and res.best.score <= min(t.score for t in res.trials)


def test_trials_csv(tmp_path):
    prob = get_problem("booth")
    res = random_search(prob, "rgd", 3, 10, seed=0)
    path = tmp_path / "t.csv"
    write_trials_csv(path, res.trials)
    lines = path.read_text().splitlines()
    assert lines[0] == "method,index,seed,epsilon,mu,delta,alpha,score,diverged"
    assert len(lines) == 4
    eps = float(lines[1].split(",")[3])
    assert eps == res.trials[0].params.epsilon
