"""Fourth-moment and contraction diagnostics for single chaoses.

Dense kernels go through explicit contractions; rank-one sums always stay
on the Gram path so that N in the thousands never materialises a tensor.
"""

import logging
import math
from dataclasses import dataclass

from ..exceptions import ContractionOrderError, DimensionMismatchError
from ..tensor.dense import DenseSymTensor, contract, norm
from ..tensor.gram import RankOneSum, gram_contract_inner
from .expansion import DEFAULT_ORDER_CAP, ChaosExpansion, covariance, multiply

logger = logging.getLogger(__name__)

Kernel = DenseSymTensor | RankOneSum

INDEPENDENCE_TOLERANCE = 1e-10


def fourth_moment(X: ChaosExpansion, order_cap: int = DEFAULT_ORDER_CAP) -> float:
    """E[X^4] of a pure chaos X, computed as Var(X^2) + (E X^2)^2."""
    if not X.is_pure():
        raise ContractionOrderError("fourth_moment expects a single chaos of order >= 1")
    square = multiply(X, X, order_cap=order_cap)
    return covariance(square, square) + square.mean**2


def fourth_cumulant(X: ChaosExpansion, order_cap: int = DEFAULT_ORDER_CAP) -> float:
    """E X^4 - 3 (E X^2)^2, non-negative on a pure chaos."""
    return fourth_moment(X, order_cap) - 3.0 * X.second_moment() ** 2


def fourth_moment_gram(f: RankOneSum) -> float:
    """E[I_p(f)^4] on the Gram path, for p = 1 or p = 2.

    For p = 2 the kernel f (x)_1 f is already symmetric and
    E X^4 = 3 (E X^2)^2 + 48 |f (x)_1 f|^2.
    """
    second = math.factorial(f.order) * f.norm2()
    if f.order == 1:
        return 3.0 * second**2
    if f.order == 2:
        return 3.0 * second**2 + 48.0 * gram_contract_inner(f, f, 1)
    raise ContractionOrderError(
        f"Gram-path fourth moment supports orders 1 and 2, got {f.order}; densify instead"
    )


def _contraction_norm(f: Kernel, g: Kernel, r: int) -> float:
    if isinstance(f, RankOneSum) and isinstance(g, RankOneSum):
        return math.sqrt(max(gram_contract_inner(f, g, r), 0.0))
    if isinstance(f, DenseSymTensor) and isinstance(g, DenseSymTensor):
        return norm(contract(f, g, r))
    raise DimensionMismatchError("Cannot contract a dense tensor with a rank-one sum")


def contraction_diagnostics(f: Kernel) -> list[float]:
    """|f (x)_r f| for r = 1, ..., p - 1.

    All of them vanish in the limit exactly when the chaos is asymptotically
    Gaussian.
    """
    if f.order < 2:
        raise ContractionOrderError(f"Self-contractions need order >= 2, got {f.order}")
    values = [_contraction_norm(f, f, r) for r in range(1, f.order)]
    logger.debug(f"Contraction norms of order-{f.order} kernel: {values}")
    return values


def contraction_range(p: int, q: int) -> range:
    """Contraction indices that must vanish for asymptotic independence.

    The full contraction r = p is excluded when p = q, since it is the
    covariance and need not vanish.
    """
    top = min(p, q)
    return range(1, top) if p == q else range(1, top + 1)


def cross_contraction_norms(f: Kernel, g: Kernel) -> list[float]:
    """|f (x)_r g| over ``contraction_range(p, q)``."""
    if f.order < 2:
        raise ContractionOrderError(f"Left kernel needs order >= 2, got {f.order}")
    return [_contraction_norm(f, g, r) for r in contraction_range(f.order, g.order)]


@dataclass(frozen=True)
class IndependenceVerdict:
    """Whether I_p(f) and I_q(g) are independent: f (x)_1 g = 0."""

    contraction_norm: float
    independent: bool


def independence_criterion(
    f: Kernel, g: Kernel, tolerance: float = INDEPENDENCE_TOLERANCE
) -> IndependenceVerdict:
    if f.order < 1 or g.order < 1:
        raise ContractionOrderError("Independence criterion needs kernels of order >= 1")
    value = _contraction_norm(f, g, 1)
    return IndependenceVerdict(value, value <= tolerance)
