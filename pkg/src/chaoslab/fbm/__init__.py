"""Fractional Gaussian noise: covariances, samplers, kernels and exact moments."""

from .correlated import CorrelatedGrid, MovingAverageDesign, sample_correlated_fgn
from .covariance import (
    CovarianceModel,
    check_hurst,
    cross_constants,
    increment_cross_covariance,
    increment_gram,
    mvn_normalizer,
    mvn_normalizer_closed_form,
    rho,
    rho_tail_constant,
    tau,
)
from .kernels import (
    breuer_major_boundary,
    breuer_major_kernel,
    breuer_major_sigma2,
    hermite_variation_kernel,
    limit_self_similarity,
    pure_chaos_covariance,
    rosenblatt_proxy_kernel,
)
from .moments import (
    breuer_major_variance,
    check_central_noncentral_region,
    derivative_pair_moment,
    derivative_pair_sums,
    exponential_covariance,
    exponential_gamma_moment,
    exponential_pair_sum,
    hermite_variation_covariance,
    lag_power_sum,
    rosenblatt_proxy_gap,
    toeplitz_form,
)
from .sampling import SamplerMethod, fbm_on_grid, sample_fgn, sample_stationary

__all__ = [
    "CovarianceModel",
    "check_hurst",
    "cross_constants",
    "increment_cross_covariance",
    "increment_gram",
    "mvn_normalizer",
    "mvn_normalizer_closed_form",
    "rho",
    "rho_tail_constant",
    "tau",
    "SamplerMethod",
    "sample_fgn",
    "sample_stationary",
    "fbm_on_grid",
    "CorrelatedGrid",
    "MovingAverageDesign",
    "sample_correlated_fgn",
    "breuer_major_boundary",
    "breuer_major_kernel",
    "breuer_major_sigma2",
    "hermite_variation_kernel",
    "limit_self_similarity",
    "pure_chaos_covariance",
    "rosenblatt_proxy_kernel",
    "breuer_major_variance",
    "check_central_noncentral_region",
    "derivative_pair_moment",
    "derivative_pair_sums",
    "exponential_covariance",
    "exponential_gamma_moment",
    "exponential_pair_sum",
    "hermite_variation_covariance",
    "lag_power_sum",
    "rosenblatt_proxy_gap",
    "toeplitz_form",
]
