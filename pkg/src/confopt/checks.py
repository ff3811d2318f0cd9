"""Structural and benchmark checks behind ``confopt diagnose``.

Each ``check_*`` function returns a :class:`CheckResult` with its measured
quantities, so the same numbers feed the JSON report and the test suite.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import diagnostics as dg
from . import stability as st
from .core import AlgState, OptimizerParams, PhaseState, PhysicalParams, rgd_params_to_physical, velocity_scale
from .integrators import SeparableHamiltonian, conformal_euler_step, conformal_leapfrog_step
from .optimizers import (
    StopCriteria,
    cm_phase_step,
    get_stepper,
    nag_phase_step,
    relativistic_euler_step,
    rgd_phase_step,
    rgd_step,
    run,
)
from .problems import corpus, get_problem, make_correlated_quadratic, quadratic, rosenbrock, schwefel
from .problems.matcomp import alternating_minimize, matcomp_generate
from .tuning import matcomp_search, random_search


@dataclass
class CheckResult:
    id: int
    name: str
    passed: bool
    details: dict = field(default_factory=dict)
    runtime: float = 0.0
    time_limit: float | None = None
    soft: bool = False

    def to_dict(self) -> dict:
        return {"id": self.id, "name": self.name, "passed": self.passed, "soft": self.soft,
                "runtime": self.runtime, "time_limit": self.time_limit, "details": _jsonable(self.details)}

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        soft = " (soft)" if self.soft else ""
        return f"[{tag}] criterion {self.id}: {self.name}{soft} ({self.runtime:.2f}s)"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj


def _timed(cid, name, limit, soft=False):
    def wrap(fn):
        def inner(*args, **kwargs):
            t0 = time.perf_counter()
            passed, details = fn(*args, **kwargs)
            dt = time.perf_counter() - t0
            in_time = limit is None or dt < limit
            details["within_time_limit"] = in_time
            return CheckResult(cid, name, bool(passed and in_time), details, dt, limit, soft)
        inner.__name__ = fn.__name__
        inner.__doc__ = fn.__doc__
        return inner
    return wrap


# --- 1. conformal symplecticity -------------------------------------------------

@_timed(1, "conformal symplecticity of CM, leapfrog, RGD(alpha=1), relativistic Euler", 5.0)
def check_conformal_symplectic(points: int = 20, seed: int = 0, tol: float = 1e-5, fd_step: float = 1e-5):
    h, gamma = 0.05, 1.0
    rng = np.random.default_rng(seed)
    problems = [make_correlated_quadratic(2), make_correlated_quadratic(10), rosenbrock(2)]
    worst = {}
    for prob in problems:
        H = SeparableHamiltonian(prob)
        Hrel = SeparableHamiltonian(prob, c=2.0)
        maps = {
            "cm": lambda z: cm_phase_step(z, PhysicalParams(h, gamma), prob.grad),
            "leapfrog": lambda z: conformal_leapfrog_step(H, z, h, gamma),
            "rgd_alpha1": lambda z: rgd_phase_step(z, PhysicalParams(h, gamma, c=2.0), 1.0, prob.grad),
            "relativistic_euler": lambda z: relativistic_euler_step(z, PhysicalParams(h, gamma, c=2.0), prob.grad),
            "euler_rel": lambda z: conformal_euler_step(Hrel, z, h, gamma),
        }
        for _ in range(points):
            z = PhaseState(prob.sample_domain(rng), rng.standard_normal(prob.dim))
            for name, step in maps.items():
                r = dg.conformal_residual(dg.numerical_jacobian(dg.flat_phase_map(step), z, fd_step), gamma, h)
                key = f"{prob.name}[{prob.dim}]/{name}"
                worst[key] = max(worst.get(key, 0.0), r)
    return max(worst.values()) <= tol, {"tol": tol, "h": h, "gamma": gamma, "max_residual": worst}


# --- 2. Nesterov is not conformal symplectic ----------------------------------

@_timed(2, "NAG Jacobian determinant and residual on a 1-D quadratic", 1.0)
def check_nag_contraction(lam: float = 1.0, m: float = 1.0, gamma: float = 1.0, h: float = 0.1):
    prob = quadratic(np.array([[lam]]))
    phys = PhysicalParams(h, gamma, m)
    J = dg.numerical_jacobian(dg.flat_phase_map(lambda z: nag_phase_step(z, phys, prob.grad)),
                              PhaseState([0.3], [-0.2]))
    det = float(np.linalg.det(J))
    expected = dg.nag_contraction_factor(lam, m, gamma, h)
    rel = abs(det - expected) / abs(expected)
    res = dg.conformal_residual(J, gamma, h)
    return rel <= 1e-6 and res >= 5e-3, {"det": det, "expected": expected, "rel_err": rel, "residual": res}


# --- 3. order of accuracy -------------------------------------------------------

def _order_reports(hs=dg.DEFAULT_HS, gamma=1.0, c=1.0):
    prob = quadratic(np.array([[1.0]]))
    z0 = PhaseState([1.0], [0.5])
    H = SeparableHamiltonian(prob)
    Hc = SeparableHamiltonian(prob, c=c)
    sys_cl = dg.conformal_system(H, gamma)
    sys_c = dg.conformal_system(Hc, gamma)
    return [
        (2, dg.estimate_order(lambda z, h: conformal_euler_step(H, z, h, gamma), sys_cl, z0, hs, 1, label="euler")),
        (2, dg.estimate_order(lambda z, h: nag_phase_step(z, PhysicalParams(h, gamma), prob.grad),
                              sys_cl, z0, hs, 1, label="nag")),
        (3, dg.estimate_order(lambda z, h: conformal_leapfrog_step(H, z, h, gamma), sys_cl, z0, hs, 2,
                              label="leapfrog")),
        (3, dg.estimate_order(lambda z, h: rgd_phase_step(z, PhysicalParams(h, gamma, c=c), 1.0, prob.grad),
                              sys_c, z0, hs, 2, label=f"rgd_alpha1_c{c:g}")),
    ]


@_timed(3, "one-step order of accuracy", 10.0)
def check_orders(tol: float = 0.15):
    out, ok = {}, True
    for target, rep in _order_reports():
        good = abs(rep.slope - target) <= tol
        ok &= good
        out[rep.label] = {"slope": rep.slope, "target": target, "monotone": rep.monotone, "errors": rep.errors}
    return ok, out


# --- 4. shadow systems ------------------------------------------------------------

@_timed(4, "modified equations and heavy-ball shadow Hamiltonian", 10.0)
def check_shadow(tol: float = 0.2, fd_tol: float = 1e-8, seed: int = 0):
    prob = quadratic(np.array([[1.0]]))
    z0 = PhaseState([1.0], [0.5])
    out, ok = {}, True
    for method in ("nag", "cm"):
        rep = dg.shadow_order_check(method, z0, prob, gamma=1.0)
        good = abs(rep.slope - 3.0) <= tol
        ok &= good
        out[f"{method}_slope"] = rep.slope
    rng = np.random.default_rng(seed)
    worst = 0.0
    for p in (quadratic(np.array([[2.0]])), make_correlated_quadratic(6), get_problem("booth")):
        for _ in range(5):
            z = PhaseState(p.sample_domain(rng), rng.standard_normal(p.dim))
            phys = PhysicalParams(0.1, 0.7, 1.3)
            fd = dg.conformal_field_fd(lambda w: dg.shadow_hamiltonian_value(w, p, phys), z, phys.gamma)
            exact = dg.cm_modified_system(p, phys)(z.as_vector())
            worst = max(worst, float(np.max(np.abs(fd - exact)) / max(1.0, float(np.max(np.abs(exact))))))
    out["shadow_field_max_rel_err"] = worst
    return ok and worst <= fd_tol, out


# --- 5. stability thresholds --------------------------------------------------

@_timed(5, "stability thresholds, ordering and determinant identities", 5.0)
def check_stability(rel_tol: float = 1e-3):
    out = {"threshold_match": {}}
    match = True
    for mu in (0.5, 0.9, 0.99):
        for method in st.STABILITY_METHODS:
            q = st.StabilityQuery(method, mu)
            ha = st.analytic_threshold(q)
            he = st.empirical_threshold(method, mu)
            rel = abs(he - ha) / ha
            match &= rel <= rel_tol
            out["threshold_match"][f"{method}@{mu}"] = {
                "analytic": ha, "empirical": he, "rel_err": rel, "closed_form": st.closed_form_threshold(q)}
    grid = np.linspace(0.01, 0.99, 100)
    ord_emp = all(st.empirical_threshold("nag", mu, tol=1e-9) < st.empirical_threshold("cm", mu, tol=1e-9)
                  < st.empirical_threshold("rgd", mu, tol=1e-9) for mu in grid)
    ord_ana = all(st.analytic_threshold(st.StabilityQuery("nag", mu)) < st.analytic_threshold(st.StabilityQuery("cm", mu))
                  < st.analytic_threshold(st.StabilityQuery("rgd", mu)) for mu in grid)
    rng = np.random.default_rng(0)
    det_err = 0.0
    for _ in range(200):
        h, gamma, m, lam = rng.uniform(0.01, 3), rng.uniform(0, 3), rng.uniform(0.2, 5), rng.uniform(0.2, 5)
        mu = math.exp(-gamma * h)
        dets = {"cm": mu, "rgd": mu, "nag": mu * (1 - h * h * lam / m)}
        for method, d in dets.items():
            det_err = max(det_err, abs(float(np.linalg.det(st.transition_matrix(method, h, gamma, m, lam))) - d))
    out.update({"analytic_vs_empirical_match": match, "ordering_empirical": ord_emp,
                "ordering_analytic": ord_ana, "det_max_err": det_err})
    return match and ord_emp and ord_ana and det_err <= 1e-12, out


# --- 6. eigenvalue geometry -------------------------------------------------------

@_timed(6, "eigenvalue circles of CM, RGD and NAG", None)
def check_eigen_geometry(n: int = 50, gamma: float = 1.0, tol: float = 1e-10):
    out = {}
    ok = True
    for method in st.STABILITY_METHODS:
        hs = []
        for h in np.linspace(1e-3, 4.0, 4000):
            e1, _ = st.eigenvalues_2x2(st.transition_matrix(method, h, gamma))
            if abs(e1.imag) > 1e-8:
                hs.append(h)
        hs = hs[:: max(1, len(hs) // n)][:n]
        worst = 0.0
        for h in hs:
            eigs = st.eigenvalues_2x2(st.transition_matrix(method, h, gamma))
            if method == "nag":
                c = 1.0 / (math.exp(gamma * h) + 1.0)
                worst = max(worst, *(abs(abs(e - c) - c) for e in eigs))
            else:
                worst = max(worst, *(abs(abs(e) - math.exp(-gamma * h / 2)) for e in eigs))
        ok &= len(hs) == n and worst <= tol
        out[method] = {"count": len(hs), "max_err": worst}
    return ok, out


# --- 7. limit cases -----------------------------------------------------------

@_timed(7, "RGD limit cases and relativistic Euler at large c", None)
def check_limits(iters: int = 100, eps: float = 0.05, mu: float = 0.9):
    prob = make_correlated_quadratic()
    x0 = prob.init_default
    # RGD(delta=0, alpha=0) against Nesterov
    s_r = s_n = AlgState(x0)
    nag = get_stepper("nag")
    dev_nag = 0.0
    for _ in range(iters):
        s_r = rgd_step(s_r, OptimizerParams(eps, mu, 0.0, 0.0), prob.grad)
        s_n = nag(s_n, OptimizerParams(eps, mu), prob.grad)
        dev_nag += float(np.linalg.norm(s_r.x - s_n.x))
    # RGD(delta=0, alpha=1) against the dissipative leapfrog
    params = OptimizerParams(eps, mu, 0.0, 1.0)
    phys = rgd_params_to_physical(params)
    H = SeparableHamiltonian(prob)
    s = AlgState(x0)
    z = PhaseState(x0)
    dev_lf = 0.0
    for _ in range(iters):
        s = rgd_step(s, params, prob.grad)
        z = conformal_leapfrog_step(H, z, phys.h, phys.gamma)
        dev_lf += float(np.linalg.norm(s.x - z.x)) + float(np.linalg.norm(s.v - velocity_scale(phys, "rgd") * z.p))
    # relativistic Euler with c = 1e8 against heavy ball
    cl = PhysicalParams(0.2, 0.5)
    rel = PhysicalParams(0.2, 0.5, c=1e8)
    za = zb = PhaseState(x0)
    rel_dev = 0.0
    for _ in range(iters):
        za = cm_phase_step(za, cl, prob.grad)
        zb = relativistic_euler_step(zb, rel, prob.grad)
        rel_dev = max(rel_dev, float(np.linalg.norm(za.x - zb.x) / np.linalg.norm(za.x)))
    ok = dev_nag <= 1e-10 and dev_lf <= 1e-10 and rel_dev <= 1e-6
    return ok, {"rgd_vs_nag": dev_nag, "rgd_vs_leapfrog": dev_lf, "relativistic_euler_vs_cm": rel_dev}


# --- 8. bounded update ------------------------------------------------------------

@_timed(8, "bounded RGD displacement on x^10; heavy ball diverges", None)
def check_bounded_update(iters: int = 2000, eps: float = 0.01, mu: float = 0.9, delta: float = 1.0):
    prob = schwefel()
    out, ok = {}, True
    for alpha in (1.0, 0.5, 0.0):
        params = OptimizerParams(eps, mu, delta, alpha)
        tr = run("rgd", prob, params, stop=StopCriteria(max_iters=iters))
        worst = 0.0
        for a, b in zip(tr.states[:-1], tr.states[1:]):
            vv = float(np.dot(a.v, a.v))
            x_half = a.x + math.sqrt(mu) / math.sqrt(mu * delta * vv + 1.0) * a.v
            y = alpha * x_half + (1 - alpha) * a.x
            worst = max(worst, float(np.linalg.norm(b.x - y)))
        good = worst <= 1.0 + 1e-12 and not tr.diverged
        ok &= good
        out[f"rgd_alpha{alpha:g}"] = {"max_step": worst, "diverged": tr.diverged, "final_f": tr.fvals[-1]}
    cm = run("cm", prob, OptimizerParams(eps, mu), stop=StopCriteria(max_iters=iters))
    out["cm"] = {"diverged": cm.diverged, "iterations": cm.iterations}
    return ok and cm.diverged, out


# --- 9. desk-scale benchmark ------------------------------------------------------

BENCH_PROBLEMS = ("rosenbrock", "beale", "zakharov", "camel", "corr_quad", "rand_quad")


@_timed(9, "desk-scale random-search benchmark", 600.0, soft=True)
def check_benchmark(budget: int = 300, iters: int = 500, seed: int = 0, problems=BENCH_PROBLEMS):
    out, ok = {}, True
    for name in problems:
        prob = get_problem(name)
        best = {m: random_search(prob, m, budget, iters, seed).best.score for m in ("cm", "nag", "rgd")}
        if name in ("corr_quad", "rand_quad"):
            good = best["rgd"] <= 10.0 * min(best["cm"], best["nag"])
            rule = "rgd <= 10 x best competitor"
        else:
            good = best["rgd"] <= best["cm"] and best["rgd"] <= best["nag"]
            rule = "rgd <= cm and rgd <= nag"
        ok &= good
        out[name] = {**best, "rule": rule, "passed": good}
    return ok, out


# --- 10. matrix completion ----------------------------------------------------------

@_timed(10, "matrix completion: tuned RGD beats tuned GD", 300.0)
def check_matcomp(budget: int = 60, iters: int = 500, seed: int = 0):
    inst = matcomp_generate(100, 5, 0.3, seed=0)
    ratio_ok = inst.degrees_of_freedom == 975 and inst.observed == 3000 and inst.hardness == 0.325
    out = {"d": inst.degrees_of_freedom, "p": inst.observed, "d_over_p": inst.hardness}
    final = {}
    for method in ("gd", "rgd"):
        res = matcomp_search(inst, method, budget, iters, seed)
        tr = alternating_minimize(inst, method, res.best.params, iters)
        final[method] = tr.fvals[-1]
        out[method] = {"best_min_loss": res.best.score, "final_loss": tr.fvals[-1],
                       "params": res.best.params.__dict__}
    return ratio_ok and final["rgd"] < final["gd"], out


# --- 11. corpus integrity -------------------------------------------------------

def fd_gradient(f, x, rel_step: float = 1e-6):
    g = np.empty_like(x)
    for i in range(x.size):
        hstep = rel_step * (1.0 + abs(x[i]))
        e = np.zeros_like(x)
        e[i] = hstep
        g[i] = (f(x + e) - f(x - e)) / (2 * hstep)
    return g


@_timed(11, "corpus gradients and declared minima", 10.0)
def check_corpus(points: int = 10, seed: int = 0, rel_tol: float = 1e-5):
    rng = np.random.default_rng(seed)
    out, ok = {}, True
    probs = corpus() + [make_correlated_quadratic(), get_problem("rand_quad", 100)]
    for p in probs:
        worst = 0.0
        for _ in range(points):
            x = p.sample_domain(rng)
            g = p.grad(x)
            worst = max(worst, float(np.linalg.norm(fd_gradient(p.f, x) - g) / max(1.0, np.linalg.norm(g))))
        entry = {"fd_rel_err": worst}
        good = worst <= rel_tol
        if p.known_min is not None:
            xs, fs = p.known_min
            gn = float(np.linalg.norm(p.grad(xs)))
            fe = abs(p.f(xs) - fs)
            entry.update(grad_at_min=gn, f_err_at_min=fe)
            good &= gn <= 1e-8 and fe <= 1e-10
        ok &= good
        out[p.name] = entry
    return ok, out


STRUCTURAL = (check_conformal_symplectic, check_nag_contraction, check_orders, check_shadow,
              check_stability, check_eigen_geometry, check_limits, check_bounded_update, check_corpus)
BENCHMARKS = (check_benchmark, check_matcomp)


def run_checks(include_benchmarks: bool = False) -> list[CheckResult]:
    checks = STRUCTURAL + (BENCHMARKS if include_benchmarks else ())
    return sorted((c() for c in checks), key=lambda r: r.id)
