"""Multiple Wiener-Ito integrals on finite-dimensional Gaussian spaces."""

from .diagnostics import (
    IndependenceVerdict,
    contraction_diagnostics,
    contraction_range,
    cross_contraction_norms,
    fourth_cumulant,
    fourth_moment,
    fourth_moment_gram,
    independence_criterion,
)
from .expansion import (
    DEFAULT_ORDER_CAP,
    ChaosExpansion,
    TruncatedExpansion,
    covariance,
    eval_multiple_integral,
    exponential_expansion,
    multiply,
)
from .hermite import HermiteTable, hermite

__all__ = [
    "hermite",
    "HermiteTable",
    "ChaosExpansion",
    "TruncatedExpansion",
    "DEFAULT_ORDER_CAP",
    "eval_multiple_integral",
    "multiply",
    "covariance",
    "exponential_expansion",
    "fourth_moment",
    "fourth_moment_gram",
    "fourth_cumulant",
    "contraction_diagnostics",
    "contraction_range",
    "cross_contraction_norms",
    "independence_criterion",
    "IndependenceVerdict",
]
