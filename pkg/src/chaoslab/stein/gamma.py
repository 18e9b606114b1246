"""The Malliavin cross-quantity Gamma(X, Y) = <D(-L)^{-1} X, DY> as an expansion.

On the p-th chaos D I_p(f)_t = p I_{p-1}(f(t, .)) and (-L)^{-1} divides by
p, so D(-L)^{-1} X_t = sum_p I_{p-1}(f_p(t, .)). The pairing over t is
carried out coordinate by coordinate with the product formula.
"""

import logging
import math

import numpy as np

from ..chaos.expansion import DEFAULT_ORDER_CAP, ChaosExpansion, covariance, multiply
from ..exceptions import (
    ContractionOrderError,
    DimensionMismatchError,
    NonCenteredError,
    OrderCapExceededError,
)
from ..tensor.dense import DenseSymTensor

logger = logging.getLogger(__name__)

CENTERING_TOLERANCE = 1e-12


def _slice(X: ChaosExpansion, t: int, weighted: bool) -> ChaosExpansion:
    # sum_p c_p I_{p-1}(f_p(t, .)), c_p = p for D and 1 for D(-L)^{-1}
    kernels: dict[int, DenseSymTensor] = {}
    for p, f in X.kernels.items():
        if p == 0:
            continue
        factor = float(p) if weighted else 1.0
        kernels[p - 1] = DenseSymTensor(factor * f.coeffs[t])
    return ChaosExpansion(X.dim, kernels)


def _pairing(
    left: ChaosExpansion,
    right: ChaosExpansion,
    left_weighted: bool,
    order_cap: int,
) -> ChaosExpansion:
    if left.dim != right.dim:
        raise DimensionMismatchError(f"Expansions live on R^{left.dim} and R^{right.dim}")
    total = ChaosExpansion(left.dim)
    for t in range(left.dim):
        a = _slice(left, t, weighted=left_weighted)
        b = _slice(right, t, weighted=True)
        if not a.kernels or not b.kernels:
            continue
        total = total + multiply(a, b, order_cap=order_cap)
    return total


def _check_orders(X: ChaosExpansion, Y: ChaosExpansion, order_cap: int) -> None:
    top = max(X.order + Y.order - 2, 0)
    if top > order_cap:
        raise OrderCapExceededError(top, order_cap)


def gamma(
    X: ChaosExpansion, Y: ChaosExpansion, order_cap: int = DEFAULT_ORDER_CAP
) -> ChaosExpansion:
    """Chaos expansion of <D(-L)^{-1} X, DY>.

    Args:
        X: Centered expansion
        Y: Any expansion on the same space
        order_cap: Largest chaos order allowed in the result

    Returns:
        The expansion of Gamma(X, Y); its mean equals E[XY]

    Raises:
        NonCenteredError: If X has a nonzero mean
        OrderCapExceededError: If the result would exceed ``order_cap``
    """
    if abs(X.mean) > CENTERING_TOLERANCE:
        raise NonCenteredError(f"Gamma needs a centered X, got mean {X.mean:.3e}")
    _check_orders(X, Y, order_cap)
    return _pairing(X, Y, left_weighted=False, order_cap=order_cap)


def derivative_inner(
    X: ChaosExpansion, Y: ChaosExpansion, order_cap: int = DEFAULT_ORDER_CAP
) -> ChaosExpansion:
    """Chaos expansion of <DX, DY>."""
    _check_orders(X, Y, order_cap)
    return _pairing(X, Y, left_weighted=True, order_cap=order_cap)


def derivative_norm(X: ChaosExpansion, order_cap: int = DEFAULT_ORDER_CAP) -> ChaosExpansion:
    """|DX|^2 as an expansion; on the p-th chaos this is p * Gamma(X, X)."""
    return derivative_inner(X, X, order_cap)


def derivative_norm_deviation(X: ChaosExpansion, order_cap: int = DEFAULT_ORDER_CAP) -> float:
    """L2 distance between |DX|^2 and p E[X^2] for a pure chaos X of order p."""
    if not X.is_pure():
        raise ContractionOrderError("derivative_norm_deviation expects a single chaos")
    norm2 = derivative_norm(X, order_cap)
    target = X.order * X.second_moment()
    return math.sqrt(max(covariance(norm2, norm2) + (norm2.mean - target) ** 2, 0.0))


def gamma_second_moment(
    X: ChaosExpansion, Y: ChaosExpansion, order_cap: int = DEFAULT_ORDER_CAP
) -> float:
    """E[Gamma(X, Y)^2] = Var Gamma + (E Gamma)^2, exact via the isometry."""
    g = gamma(X, Y, order_cap)
    value = covariance(g, g) + g.mean**2
    logger.debug(f"E Gamma^2 = {value:.6e} for orders {X.orders} x {Y.orders}")
    return float(np.clip(value, 0.0, None))
