"""chaoslab: Wiener chaos, Stein-Malliavin bounds and fractional Gaussian experiments."""

# ruff: noqa: E402

# defined before the subpackage imports, explab.output reads it
__version__ = "0.1.0"

# Tensor and chaos exports
from .chaos.expansion import ChaosExpansion, covariance, multiply
from .distance.wasserstein import (
    EmpiricalSample,
    SlicedSettings,
    independence_gap,
    w1_1d,
    w1_sliced,
)
from .exceptions import ChaosLabError

# Experiment exports
from .explab import (
    ExperimentConfig,
    ExperimentName,
    RunManifest,
    load_experiment_config,
    rate_fit,
    run_central_noncentral,
    run_counterexample,
    run_experiment,
    run_hurst_estimators,
    run_infinite_chaos,
    run_joint_clt,
    run_sde_dependence,
)
from .fbm.covariance import rho
from .fbm.kernels import breuer_major_kernel, breuer_major_sigma2
from .fbm.sampling import sample_fgn
from .stein.bounds import BoundReport, SteinTarget, stein_bound
from .tensor.dense import DenseSymTensor, contract
from .tensor.gram import GramMatrix, RankOneSum

__all__ = [
    "__version__",
    "ChaosLabError",
    # Tensors and chaos
    "DenseSymTensor",
    "contract",
    "GramMatrix",
    "RankOneSum",
    "ChaosExpansion",
    "multiply",
    "covariance",
    # Stein
    "SteinTarget",
    "BoundReport",
    "stein_bound",
    # fBm
    "rho",
    "sample_fgn",
    "breuer_major_kernel",
    "breuer_major_sigma2",
    # Distances
    "EmpiricalSample",
    "SlicedSettings",
    "w1_1d",
    "w1_sliced",
    "independence_gap",
    # Experiments
    "ExperimentConfig",
    "ExperimentName",
    "RunManifest",
    "load_experiment_config",
    "rate_fit",
    "run_experiment",
    "run_joint_clt",
    "run_infinite_chaos",
    "run_central_noncentral",
    "run_counterexample",
    "run_sde_dependence",
    "run_hurst_estimators",
]
