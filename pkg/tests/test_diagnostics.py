import math

import numpy as np
import pytest
from scipy.linalg import expm

from confopt.core import AlgState, OptimizerParams, PhaseState, PhysicalParams
from confopt.diagnostics import (
    DEFAULT_HS,
    DiagnosticsError,
    conformal_field_fd,
    conformal_residual,
    conformal_system,
    cm_modified_system,
    estimate_order,
    fit_slope,
    flat_alg_map,
    flat_phase_map,
    jacobian_report,
    nag_contraction_factor,
    nag_modified_system,
    numerical_jacobian,
    reference_solve,
    reference_trajectory,
    rk4_integrate,
    shadow_hamiltonian_value,
    shadow_order_check,
    symplectic_matrix,
)
from confopt.integrators import (
    SeparableHamiltonian,
    conformal_euler_step,
    conformal_leapfrog_step,
    dissipative_flow_exact,
    hamiltonian_value,
)
from confopt.optimizers import cm_phase_step, nag_phase_step, nag_step, rgd_step
from confopt.problems import get_problem, make_correlated_quadratic, quadratic, rosenbrock
from confopt.stability import transition_matrix

oscillator = quadratic([[1.0]])


def test_symplectic_matrix():
    Om = symplectic_matrix(2)
    assert np.array_equal(Om.T, -Om) and np.array_equal(Om @ Om, -np.eye(4))


def test_jacobian_identity_and_damping():
    z = PhaseState([0.3, -1.0], [2.0, 0.5])
    assert np.allclose(numerical_jacobian(lambda v: v, z), np.eye(4), atol=1e-10)
    J = numerical_jacobian(flat_phase_map(lambda w: dissipative_flow_exact(w, 0.2, 1.5)), z)
    assert np.allclose(J, np.diag([1, 1, math.exp(-0.3), math.exp(-0.3)]), atol=1e-10)


def test_jacobian_reports_nonfinite():
    with np.errstate(all="ignore"), pytest.raises(DiagnosticsError):
        numerical_jacobian(lambda v: v / 0.0, np.ones(2))
    with pytest.raises(ValueError):
        numerical_jacobian(lambda v: v, np.ones(2), fd_step=0.0)


def test_cm_jacobian_matches_transition_matrix():
    for lam, m, gamma, h in ((1.0, 1.0, 1.0, 0.1), (3.0, 0.5, 0.2, 0.3)):
        prob = quadratic([[lam]])
        J = numerical_jacobian(flat_phase_map(lambda w: cm_phase_step(w, PhysicalParams(h, gamma, m), prob.grad)),
                               PhaseState([0.4], [0.1]))
        assert np.allclose(J, transition_matrix("cm", h, gamma, m, lam), atol=1e-8)
        J = numerical_jacobian(flat_phase_map(lambda w: nag_phase_step(w, PhysicalParams(h, gamma, m), prob.grad)),
                               PhaseState([0.4], [0.1]))
        assert np.allclose(J, transition_matrix("nag", h, gamma, m, lam), atol=1e-8)


def test_conformal_residual_rejects_odd():
    with pytest.raises(ValueError):
        conformal_residual(np.eye(3), 1.0, 0.1)
    with pytest.raises(ValueError):
        conformal_residual(np.ones((2, 4)), 1.0, 0.1)


def test_conformal_residual_cm_rosenbrock(rng):
    prob = rosenbrock(2)
    for _ in range(5):
        z = PhaseState(prob.sample_domain(rng), rng.standard_normal(2))
        rep = jacobian_report(flat_phase_map(lambda w: cm_phase_step(w, PhysicalParams(0.05, 1.0), prob.grad)),
                              z, 1.0, 0.05)
        assert rep.residual_conformal <= 1e-5
        assert rep.det_J == pytest.approx(math.exp(-2 * 0.05), rel=1e-5)
        assert set(rep.to_dict()) == {"residual_conformal", "det_J", "fd_step"}


def test_nag_residual_is_not_small():
    J = numerical_jacobian(flat_phase_map(lambda w: nag_phase_step(w, PhysicalParams(0.1, 1.0), oscillator.grad)),
                           PhaseState([1.0], [0.0]))
    res = conformal_residual(J, 1.0, 0.1)
    assert res == pytest.approx(0.01 * math.exp(-0.1), rel=1e-6)


def test_contraction_factor():
    assert nag_contraction_factor(0.0, 1.0, 1.0, 0.1) == pytest.approx(math.exp(-0.1))
    assert nag_contraction_factor(1.0, 1.0, 1.0, 0.1) == pytest.approx(0.895789, abs=1e-6)
    assert nag_contraction_factor(1.0, 1.0, 1.0, 0.1) == pytest.approx(np.linalg.det(transition_matrix("nag", 0.1, 1.0)))
    assert nag_contraction_factor(-1.0, 1.0, 1.0, 0.1) > math.exp(-0.1)


@pytest.mark.parametrize("method", ["nag", "rgd0"])
def test_extra_damped_steps_fail_residual(method, rng):
    # diagonal quadratic: the residual is mu * eps * lam_max > 0.5 eps lam_max
    lams = np.array([0.5, 2.0, 7.0])
    prob = quadratic(np.diag(lams))
    eps, mu = 0.01, 0.9
    params = OptimizerParams(eps, mu, 0.0, 0.0)
    step = nag_step if method == "nag" else rgd_step
    J = numerical_jacobian(flat_alg_map(step, params, prob.grad), rng.standard_normal(6))
    res = conformal_residual(J, -math.log(mu), 1.0)
    assert res > 0.5 * eps * lams.max()


def test_conformal_alg_steps_pass_residual(rng):
    prob = rosenbrock(2)
    from confopt.optimizers import get_stepper

    for method, params in (("cm", OptimizerParams(1e-3, 0.9)), ("rgd", OptimizerParams(1e-3, 0.9, 0.0, 1.0)),
                           ("rgd", OptimizerParams(1e-3, 0.9, 2.0, 1.0))):
        z = np.concatenate([prob.sample_domain(rng), 0.01 * rng.standard_normal(2)])
        J = numerical_jacobian(flat_alg_map(get_stepper(method), params, prob.grad), z)
        # in (x, v) coordinates the form contracts by mu per step
        assert conformal_residual(J, -math.log(0.9), 1.0) <= 1e-5


def test_rk4_reference_matches_expm():
    lam, m, gamma = 2.0, 1.5, 0.3
    A = np.array([[0.0, 1 / m], [-lam, -gamma]])
    H = SeparableHamiltonian(quadratic([[lam]]), m=m)
    system = conformal_system(H, gamma)
    z0 = PhaseState([1.0], [-0.5])
    for T in (0.1, 1.0, 3.0):
        ref = reference_solve(system, z0, T).as_vector()
        assert np.allclose(ref, expm(A * T) @ z0.as_vector(), atol=1e-10)


def test_reference_energy_behaviour():
    H = SeparableHamiltonian(get_problem("camel"))
    z0 = PhaseState([0.5, -0.3], [0.5, -0.2])
    times = np.linspace(0, 1.0, 11)
    cons = reference_trajectory(conformal_system(H, 0.0), z0, times, tol=1e-11)
    e = [hamiltonian_value(H, z) for z in cons]
    assert np.ptp(e) <= 1e-10 * max(1.0, abs(e[0]))
    damped = reference_trajectory(conformal_system(H, 0.5), z0, times, tol=1e-11)
    e = [hamiltonian_value(H, z) for z in damped]
    assert np.all(np.diff(e) <= 1e-12)


def test_reference_self_consistency():
    system = conformal_system(SeparableHamiltonian(oscillator), 1.0)
    z0 = PhaseState([1.0], [0.5])
    a = reference_solve(system, z0, 0.5, tol=1e-12).as_vector()
    n = 256
    b = rk4_integrate(system, z0.as_vector(), 0.5, n)
    c = rk4_integrate(system, z0.as_vector(), 0.5, 2 * n)
    assert np.linalg.norm(b - c) < 1e-12 and np.allclose(a, c, atol=1e-12)


def test_reference_budget_failure():
    system = conformal_system(SeparableHamiltonian(oscillator), 1.0)
    with pytest.raises(DiagnosticsError):
        reference_solve(system, PhaseState([1.0], [0.5]), 5.0, tol=1e-13, max_substeps=4)


def test_fit_slope_exact():
    hs = np.array(DEFAULT_HS)
    assert fit_slope(hs, 3.0 * hs ** 2.5) == pytest.approx(2.5)


def test_order_estimates():
    z0 = PhaseState([1.0], [0.5])
    H = SeparableHamiltonian(oscillator)
    system = conformal_system(H, 1.0)
    rep = estimate_order(lambda z, h: conformal_euler_step(H, z, h, 1.0), system, z0, DEFAULT_HS, 1)
    assert abs(rep.slope - 2) <= 0.15 and rep.monotone and rep.observed_order == pytest.approx(1, abs=0.15)
    rep = estimate_order(lambda z, h: conformal_leapfrog_step(H, z, h, 1.0), system, z0, DEFAULT_HS, 2)
    assert abs(rep.slope - 3) <= 0.15 and rep.monotone
    rep = estimate_order(lambda z, h: nag_phase_step(z, PhysicalParams(h, 1.0), oscillator.grad),
                         system, z0, DEFAULT_HS, 1)
    assert abs(rep.slope - 2) <= 0.15
    assert rep.to_dict()["claimed_order"] == 1


def test_order_estimate_rejects_bad_grid():
    system = conformal_system(SeparableHamiltonian(oscillator), 1.0)
    with pytest.raises(ValueError):
        estimate_order(lambda z, h: z, system, PhaseState([1.0]), [0.1, 0.2])


def test_shadow_orders():
    z0 = PhaseState([1.0], [0.5])
    for method in ("cm", "nag"):
        assert abs(shadow_order_check(method, z0, oscillator, 1.0).slope - 3) <= 0.2
        control = shadow_order_check(method, z0, oscillator, 1.0, modified=False)
        assert abs(control.slope - 2) <= 0.15
    with pytest.raises(ValueError):
        shadow_order_check("rgd", z0, oscillator, 1.0)


def test_shadow_order_nonlinear():
    prob = rosenbrock(2)
    z0 = PhaseState([0.3, 0.2], [0.1, -0.2])
    rep = shadow_order_check("cm", z0, prob, 0.5, hs=(0.02, 0.01, 0.005, 0.0025))
    assert abs(rep.slope - 3) <= 0.2


def test_modified_systems_differ_only_in_hessian_term(rng):
    prob = make_correlated_quadratic(3)
    phys = PhysicalParams(0.1, 0.5, 2.0)
    z = np.concatenate([rng.standard_normal(3), rng.standard_normal(3)])
    d = cm_modified_system(prob, phys)(z) - nag_modified_system(prob, phys)(z)
    assert np.allclose(d[:3], 0) and np.allclose(d[3:], (0.1 / 2.0) * prob.hess(z[:3]) @ z[3:])
    with pytest.raises(ValueError):
        cm_modified_system(get_problem("beale"), phys)


def test_shadow_hamiltonian_limits(rng):
    prob = rosenbrock(2)
    z = PhaseState(rng.uniform(-1, 1, 2), rng.standard_normal(2))
    H = SeparableHamiltonian(prob, m=1.7)
    tiny = PhysicalParams(1e-300, 0.8, 1.7)
    assert shadow_hamiltonian_value(z, prob, tiny) == pytest.approx(hamiltonian_value(H, z), rel=1e-14)
    still = PhaseState(z.x)
    assert shadow_hamiltonian_value(still, prob, PhysicalParams(0.1, 0.0)) == pytest.approx(prob.f(z.x))


def test_shadow_hamiltonian_generates_modified_cm(rng):
    for prob in (oscillator, make_correlated_quadratic(4), get_problem("booth")):
        for _ in range(3):
            z = PhaseState(prob.sample_domain(rng) / 10, rng.standard_normal(prob.dim))
            phys = PhysicalParams(0.1, 0.6, 1.2)
            fd = conformal_field_fd(lambda w: shadow_hamiltonian_value(w, prob, phys), z, phys.gamma)
            exact = cm_modified_system(prob, phys)(z.as_vector())
            assert np.allclose(fd, exact, atol=1e-8 * max(1, np.abs(exact).max()))
