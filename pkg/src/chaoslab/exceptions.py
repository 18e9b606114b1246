"""Exception hierarchy for chaoslab."""


class ChaosLabError(Exception):
    """Base class for every error raised by chaoslab."""


class DimensionMismatchError(ChaosLabError, ValueError):
    """Operands live over spaces of different dimension or order."""


class ContractionOrderError(ChaosLabError, ValueError):
    """Contraction index or kernel order outside the valid range."""


class OrderCapExceededError(ChaosLabError, ValueError):
    """A chaos product would exceed the configured maximal order."""

    def __init__(self, order: int, cap: int):
        self.order = order
        self.cap = cap
        super().__init__(f"Chaos order {order} exceeds the configured cap {cap}")


class NotPositiveSemidefiniteError(ChaosLabError, ValueError):
    """Gram matrix has an eigenvalue below the hard tolerance."""

    def __init__(self, min_eigenvalue: float):
        self.min_eigenvalue = min_eigenvalue
        super().__init__(
            f"Gram matrix is not positive semidefinite "
            f"(smallest eigenvalue {min_eigenvalue:.3e})"
        )


class IncompatibleGramError(ChaosLabError, ValueError):
    """Rank-one sums refer to different Gram matrices."""


class NonCenteredError(ChaosLabError, ValueError):
    """A centered random variable was required."""


class ParameterRegionError(ChaosLabError, ValueError):
    """Parameters lie outside the validity region of an operation."""


class QuadratureError(ChaosLabError, RuntimeError):
    """Numerical quadrature did not reach the requested tolerance."""

    def __init__(self, message: str, error_estimate: float):
        self.error_estimate = error_estimate
        super().__init__(f"{message} (achieved error estimate {error_estimate:.3e})")


class SamplerError(ChaosLabError, RuntimeError):
    """No sampler could produce paths with the requested covariance."""


class StepSizeError(ChaosLabError, RuntimeError):
    """Time discretisation too coarse for the strong-error self-check."""


class SampleMismatchError(ChaosLabError, ValueError):
    """Empirical samples have incompatible sizes or dimensions."""


class ConfigError(ChaosLabError, ValueError):
    """Invalid or unknown configuration entries."""


class RateFitError(ChaosLabError, ValueError):
    """A decay-rate fit received unusable data."""


class AsymmetricTensorError(ChaosLabError, ValueError):
    """Coefficients of a symmetric tensor are not permutation invariant."""


class SelfCheckError(ChaosLabError, RuntimeError):
    """An exact-moment column disagrees with its brute-force oracle."""
