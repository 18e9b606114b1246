"""Stein-Malliavin quantities: Gamma expansions, Wasserstein bounds, Stein solutions."""

from .bounds import (
    BoundReport,
    SteinTarget,
    contraction_bound,
    gamma_coefficient,
    gamma_second_moment_majorant,
    stein_bound,
    stein_bound_from_kernels,
)
from .gamma import (
    derivative_inner,
    derivative_norm,
    derivative_norm_deviation,
    gamma,
    gamma_second_moment,
)
from .solution import (
    QuadratureSettings,
    SteinBoundCheck,
    check_solution_bounds,
    gaussian_expectation,
    stein_residual,
    stein_solution_derivative,
    stein_solution_eval,
    stein_solution_from_derivative,
)

__all__ = [
    "gamma",
    "gamma_second_moment",
    "derivative_inner",
    "derivative_norm",
    "derivative_norm_deviation",
    "SteinTarget",
    "BoundReport",
    "stein_bound",
    "stein_bound_from_kernels",
    "gamma_coefficient",
    "gamma_second_moment_majorant",
    "contraction_bound",
    "QuadratureSettings",
    "SteinBoundCheck",
    "stein_solution_eval",
    "stein_solution_derivative",
    "stein_solution_from_derivative",
    "stein_residual",
    "gaussian_expectation",
    "check_solution_bounds",
]
