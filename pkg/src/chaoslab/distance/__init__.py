"""Empirical Wasserstein-1 distances."""

from .wasserstein import (
    EmpiricalSample,
    SlicedSettings,
    independence_gap,
    independence_gap_estimate,
    product_sample,
    projection_directions,
    self_distance_baseline,
    self_distance_estimate,
    sliced_distances,
    w1_1d,
    w1_sliced,
    w1_sliced_estimate,
)

__all__ = [
    "EmpiricalSample",
    "SlicedSettings",
    "independence_gap",
    "independence_gap_estimate",
    "product_sample",
    "projection_directions",
    "self_distance_baseline",
    "self_distance_estimate",
    "sliced_distances",
    "w1_1d",
    "w1_sliced",
    "w1_sliced_estimate",
]
