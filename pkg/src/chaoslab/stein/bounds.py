"""Assembly of the multidimensional Stein-Malliavin Wasserstein bounds.

For X in a fixed chaos and Y_1, ..., Y_d in L2,

    d_W(P_(X, Y), N(0, sigma^2) (x) P_Y)
        <= C [ E(sigma^2 - Gamma(X, X))^2 ]^(1/2)
           + C sum_j [ E Gamma(X, Y_j)^2 ]^(1/2).

The constant C is not pinned down analytically; reports use C = 1, so
totals are meaningful up to a fixed factor and their decay rates are exact.
"""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field

from ..chaos.expansion import DEFAULT_ORDER_CAP, ChaosExpansion
from ..exceptions import ContractionOrderError, DimensionMismatchError, ParameterRegionError
from ..tensor.dense import DenseSymTensor, contract, inner, norm
from ..tensor.gram import RankOneSum, gram_contract_inner, rank_one_inner
from .gamma import gamma, gamma_second_moment

logger = logging.getLogger(__name__)

Kernel = DenseSymTensor | RankOneSum


@dataclass(frozen=True)
class SteinTarget:
    """Centered Gaussian target N(0, sigma2)."""

    sigma2: float = 1.0

    def __post_init__(self) -> None:
        if not self.sigma2 > 0.0:
            raise ParameterRegionError(f"Target variance must be positive, got {self.sigma2}")

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)


@dataclass(frozen=True)
class BoundReport:
    """Parts of the Wasserstein bound and their sum.

    ``exact`` is False when the parts are majorants (unsymmetrized
    contraction norms) rather than exact second moments.
    """

    gamma_self_l2: float
    gamma_cross_l2: tuple[float, ...] = field(default_factory=tuple)
    drift_term: float | None = None
    exact: bool = True

    def __post_init__(self) -> None:
        parts = [self.gamma_self_l2, *self.gamma_cross_l2]
        if self.drift_term is not None:
            parts.append(self.drift_term)
        if any(part < 0.0 or math.isnan(part) for part in parts):
            raise ParameterRegionError(f"Bound parts must be non-negative, got {parts}")

    @property
    def total(self) -> float:
        drift = self.drift_term if self.drift_term is not None else 0.0
        return math.fsum([self.gamma_self_l2, *self.gamma_cross_l2, drift])

    def to_dict(self) -> dict[str, object]:
        return {
            "gamma_self_l2": self.gamma_self_l2,
            "gamma_cross_l2": list(self.gamma_cross_l2),
            "drift_term": self.drift_term,
            "total": self.total,
            "exact": self.exact,
        }


def stein_bound(
    X: ChaosExpansion,
    Ys: Sequence[ChaosExpansion],
    target: SteinTarget,
    drift_term: float | None = None,
    order_cap: int = DEFAULT_ORDER_CAP,
) -> BoundReport:
    """Exact L2 parts of the bound for a pure chaos X and expansions Ys.

    Args:
        X: Pure chaos I_p(f), p >= 1
        Ys: The companion variables
        target: Gaussian law X is compared with
        drift_term: Optional distance d_W(Y, U) added to the total
        order_cap: Largest chaos order allowed in intermediate products

    Returns:
        BoundReport with exact second-moment parts
    """
    if not X.is_pure():
        raise ContractionOrderError("stein_bound expects X in a single chaos of order >= 1")
    self_gamma = gamma(X, X, order_cap)
    # E Gamma(X, X) = E X^2, so the mean part is (sigma^2 - E X^2)^2
    self_l2 = math.sqrt(
        max((target.sigma2 - self_gamma.mean) ** 2 + self_gamma.variance(), 0.0)
    )
    cross = tuple(math.sqrt(gamma_second_moment(X, Y, order_cap)) for Y in Ys)
    report = BoundReport(self_l2, cross, drift_term, exact=True)
    logger.debug(f"Stein bound total {report.total:.6e} ({len(cross)} companions)")
    return report


def gamma_coefficient(p: int, q: int, r: int) -> float:
    """Weight of I_{p+q-2r}(f (x)~_r g) in Gamma(I_p(f), I_q(g)).

    Gamma(I_p f, I_q g) = sum_{r=1}^{min(p,q)} q (r-1)! C(p-1, r-1) C(q-1, r-1)
    I_{p+q-2r}(f (x)~_r g).
    """
    if not 1 <= r <= min(p, q):
        raise ContractionOrderError(f"Contraction index {r} outside [1, {min(p, q)}]")
    return q * math.factorial(r - 1) * math.comb(p - 1, r - 1) * math.comb(q - 1, r - 1)


def _contraction_sq(f: Kernel, g: Kernel, r: int) -> float:
    if isinstance(f, RankOneSum) and isinstance(g, RankOneSum):
        return max(gram_contract_inner(f, g, r), 0.0)
    if isinstance(f, DenseSymTensor) and isinstance(g, DenseSymTensor):
        return norm(contract(f, g, r)) ** 2
    raise DimensionMismatchError("Cannot contract a dense tensor with a rank-one sum")


def _kernel_inner(f: Kernel, g: Kernel) -> float:
    if isinstance(f, RankOneSum) and isinstance(g, RankOneSum):
        return rank_one_inner(f, g)
    if isinstance(f, DenseSymTensor) and isinstance(g, DenseSymTensor):
        return inner(f, g)
    raise DimensionMismatchError("Cannot pair a dense tensor with a rank-one sum")


def gamma_second_moment_majorant(f: Kernel, g: Kernel) -> float:
    """Upper bound of E Gamma(I_p f, I_q g)^2 from unsymmetrized contractions.

    Exact value is sum_r c_r^2 (p+q-2r)! |f (x)~_r g|^2; symmetrization
    only lowers each norm. The full contraction r = p = q is the scalar
    <f, g> and enters exactly.
    """
    p, q = f.order, g.order
    terms = []
    for r in range(1, min(p, q) + 1):
        c = gamma_coefficient(p, q, r)
        if r == p == q:
            terms.append((c * _kernel_inner(f, g)) ** 2)
        else:
            terms.append(c**2 * math.factorial(p + q - 2 * r) * _contraction_sq(f, g, r))
    return math.fsum(terms)


def stein_bound_from_kernels(
    f: Kernel,
    gs: Sequence[Kernel],
    target: SteinTarget,
    drift_term: float | None = None,
) -> BoundReport:
    """Bound for X = I_p(f) and Y_j = I_{q_j}(g_j) straight from the kernels.

    Works on the Gram path, so N-atom kernels never get densified. For
    p = 2 the self part is exact since f (x)_1 f is symmetric.
    """
    p = f.order
    if p < 1:
        raise ContractionOrderError("stein_bound_from_kernels expects order >= 1")
    second = math.factorial(p) * _kernel_inner(f, f)
    self_var = math.fsum(
        gamma_coefficient(p, p, r) ** 2
        * math.factorial(2 * p - 2 * r)
        * _contraction_sq(f, f, r)
        for r in range(1, p)
    )
    self_l2 = math.sqrt(max((target.sigma2 - second) ** 2 + self_var, 0.0))
    cross = tuple(math.sqrt(gamma_second_moment_majorant(f, g)) for g in gs)
    exact = p <= 2 and not gs
    return BoundReport(self_l2, cross, drift_term, exact=exact)


def contraction_bound(f: Kernel, g: Kernel) -> float:
    """Contraction-only bound on the distance to independence.

    sqrt(<f, g>^2 1_{p=q} + sum_{r=1}^{p-1} |f (x)_r f| + |f (x)_p g|^2 1_{p<q}),
    valid up to a constant for indices far enough in the sequence.
    """
    p, q = f.order, g.order
    if p < 1:
        raise ContractionOrderError("contraction_bound expects order >= 1")
    terms = [math.sqrt(_contraction_sq(f, f, r)) for r in range(1, p)]
    if p == q:
        terms.append(_kernel_inner(f, g) ** 2)
    elif p < q:
        terms.append(_contraction_sq(f, g, p))
    return math.sqrt(math.fsum(terms))
