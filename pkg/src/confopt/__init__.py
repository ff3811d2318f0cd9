"""Conformal symplectic integrators, momentum methods and relativistic gradient descent."""
from .core import (
    DIVERGENCE_BOUND,
    AlgState,
    OptimizerParams,
    ParameterError,
    PhaseState,
    PhysicalParams,
    Trace,
    cm_params_to_physical,
    cm_physical_to_params,
    nag_params_to_physical,
    nag_physical_to_params,
    rgd_params_to_physical,
    rgd_physical_to_params,
)
from .integrators import SeparableHamiltonian, conformal_euler_step, conformal_leapfrog_step
from .optimizers import METHODS, StopCriteria, cm_step, gd_step, nag_step, rgd_step, run
from .problems import Problem, corpus, get_problem

__version__ = "0.1.0"

__all__ = [
    "DIVERGENCE_BOUND", "AlgState", "OptimizerParams", "ParameterError", "PhaseState",
    "PhysicalParams", "Trace", "cm_params_to_physical", "cm_physical_to_params",
    "nag_params_to_physical", "nag_physical_to_params", "rgd_params_to_physical",
    "rgd_physical_to_params", "SeparableHamiltonian", "conformal_euler_step",
    "conformal_leapfrog_step", "METHODS", "StopCriteria", "cm_step", "gd_step", "nag_step",
    "rgd_step", "run", "Problem", "corpus", "get_problem",
]
