"""Finite Wiener chaos expansions F = sum_n I_n(g_n) over R^m."""

import itertools
import logging
import math
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from ..exceptions import DimensionMismatchError, OrderCapExceededError
from ..tensor.dense import (
    DenseSymTensor,
    DenseTensor,
    contract,
    inner,
    symmetrize,
    tensor_product,
)
from .hermite import probabilists_table

logger = logging.getLogger(__name__)

DEFAULT_ORDER_CAP = 8
ZERO_TOLERANCE = 1e-15


def eval_multiple_integral(f: DenseSymTensor, w: np.ndarray) -> float | np.ndarray:
    """Value of I_p(f) at isonormal coordinates w = (W(e_1), ..., W(e_m)).

    On an orthonormal basis I_p(e_{i_1} (x) ... (x) e_{i_p}) symmetrized
    equals prod_j He_{k_j}(w_j), k_j the multiplicity of j in the index.
    Summing over canonical multi-indices with their orbit sizes gives
    I_p(f)(w). ``w`` may be an (n, m) batch.
    """
    w = np.asarray(w, dtype=float)
    batched = w.ndim == 2
    w2 = np.atleast_2d(w)
    if f.order == 0:
        value = np.full(w2.shape[0], f.scalar())
        return value if batched else float(value[0])
    if w2.shape[1] != f.dim:
        raise DimensionMismatchError(
            f"Sample has {w2.shape[1]} coordinates, kernel lives on R^{f.dim}"
        )

    table = probabilists_table(w2, f.order)  # (n, m, p + 1)
    coords = np.arange(f.dim)
    total = np.zeros(w2.shape[0])
    for index, coeff, orbit in f.canonical_items():
        if abs(coeff) <= ZERO_TOLERANCE:
            continue
        counts = np.bincount(np.asarray(index), minlength=f.dim)
        total += coeff * orbit * np.prod(table[:, coords, counts], axis=1)
    return total if batched else float(total[0])


@dataclass(frozen=True, eq=False)
class ChaosExpansion:
    """Random variable with finitely many chaos components.

    ``kernels`` maps order n to the symmetric kernel g_n; order 0 holds the
    mean as a scalar tensor. Orders with no entry are zero.
    """

    dim: int
    kernels: Mapping[int, DenseSymTensor] = field(default_factory=dict)

    def __post_init__(self) -> None:
        cleaned: dict[int, DenseSymTensor] = {}
        for n, kernel in sorted(self.kernels.items()):
            if kernel.order != n:
                raise DimensionMismatchError(f"Kernel at order {n} has order {kernel.order}")
            if n > 0 and kernel.dim != self.dim:
                raise DimensionMismatchError(
                    f"Kernel of order {n} lives on R^{kernel.dim}, expansion on R^{self.dim}"
                )
            cleaned[n] = kernel
        object.__setattr__(self, "kernels", cleaned)

    @classmethod
    def constant(cls, dim: int, value: float) -> "ChaosExpansion":
        return cls(dim, {0: DenseSymTensor.scalar_tensor(value)})

    @classmethod
    def pure(cls, kernel: DenseSymTensor, dim: int | None = None) -> "ChaosExpansion":
        """I_p(kernel) as an expansion."""
        return cls(kernel.dim if dim is None else dim, {kernel.order: kernel})

    @classmethod
    def first_chaos(cls, h: np.ndarray) -> "ChaosExpansion":
        """W(h) = I_1(h)."""
        h = np.asarray(h, dtype=float)
        return cls(h.size, {1: DenseSymTensor(h)})

    @property
    def order(self) -> int:
        """Highest order carrying a kernel."""
        return max(self.kernels, default=0)

    @property
    def orders(self) -> list[int]:
        return sorted(self.kernels)

    @property
    def mean(self) -> float:
        kernel = self.kernels.get(0)
        return kernel.scalar() if kernel is not None else 0.0

    def kernel(self, n: int) -> DenseSymTensor:
        if n in self.kernels:
            return self.kernels[n]
        if n == 0:
            return DenseSymTensor.scalar_tensor(0.0)
        return DenseSymTensor(np.zeros((self.dim,) * n))

    def is_pure(self) -> bool:
        nonzero = [n for n, k in self.kernels.items() if np.any(k.coeffs != 0.0)]
        return len(nonzero) == 1 and nonzero[0] >= 1

    def second_moment(self) -> float:
        return covariance(self, self) + self.mean**2

    def variance(self) -> float:
        return covariance(self, self)

    def centered(self) -> "ChaosExpansion":
        return ChaosExpansion(self.dim, {n: k for n, k in self.kernels.items() if n > 0})

    def scale(self, factor: float) -> "ChaosExpansion":
        return ChaosExpansion(
            self.dim, {n: k.scale(factor) for n, k in self.kernels.items()}
        )

    def __add__(self, other: "ChaosExpansion") -> "ChaosExpansion":
        _check_dims(self, other)
        merged = dict(self.kernels)
        for n, kernel in other.kernels.items():
            merged[n] = merged[n] + kernel if n in merged else kernel
        return ChaosExpansion(self.dim, merged)

    def __sub__(self, other: "ChaosExpansion") -> "ChaosExpansion":
        return self + other.scale(-1.0)

    def evaluate(self, w: np.ndarray) -> float | np.ndarray:
        """Pointwise value at isonormal coordinates (single point or batch)."""
        w = np.asarray(w, dtype=float)
        total = np.zeros(np.atleast_2d(w).shape[0])
        for kernel in self.kernels.values():
            total = total + np.atleast_1d(eval_multiple_integral(kernel, np.atleast_2d(w)))
        return total if w.ndim == 2 else float(total[0])


def _check_dims(F: ChaosExpansion, G: ChaosExpansion) -> None:
    if F.dim != G.dim:
        raise DimensionMismatchError(f"Expansions live on R^{F.dim} and R^{G.dim}")


def multiply(
    F: ChaosExpansion, G: ChaosExpansion, order_cap: int = DEFAULT_ORDER_CAP
) -> ChaosExpansion:
    """Chaos expansion of F * G by the product formula.

    I_n(f) I_m(g) = sum_r r! C(n, r) C(m, r) I_{n+m-2r}(f (x)~_r g).
    """
    _check_dims(F, G)
    top = F.order + G.order
    if top > order_cap:
        raise OrderCapExceededError(top, order_cap)

    accum: dict[int, np.ndarray] = {}
    for (n, f), (m, g) in itertools.product(F.kernels.items(), G.kernels.items()):
        for r in range(min(n, m) + 1):
            weight = math.factorial(r) * math.comb(n, r) * math.comb(m, r)
            raw = tensor_product(f, g) if r == 0 else contract(f, g, r)
            order = n + m - 2 * r
            term = weight * raw.coeffs
            accum[order] = accum[order] + term if order in accum else term

    kernels = {order: symmetrize(DenseTensor(coeffs)) for order, coeffs in accum.items()}
    logger.debug(f"Multiplied expansions of orders {F.order} and {G.order}")
    return ChaosExpansion(F.dim, kernels)


def covariance(F: ChaosExpansion, G: ChaosExpansion) -> float:
    """E[FG] - E[F]E[G] = sum_{n >= 1} n! <g_n, h_n>; cross orders vanish."""
    _check_dims(F, G)
    terms = [
        math.factorial(n) * inner(f, G.kernels[n])
        for n, f in F.kernels.items()
        if n >= 1 and n in G.kernels
    ]
    return math.fsum(terms)


@dataclass(frozen=True)
class TruncatedExpansion:
    """Expansion truncated at ``order`` with the L2 mass left out."""

    expansion: ChaosExpansion
    tail_mass: float


def exponential_expansion(
    h: np.ndarray, order: int, scale: float = 1.0
) -> TruncatedExpansion:
    """exp(scale * W(h)) truncated after chaos ``order``.

    exp(s W(h)) = exp(s^2 |h|^2 / 2) sum_n s^n I_n(h^(x)n) / n!, and the
    neglected mass sum_{n > M} n! |g_n|^2 equals
    exp(2x) P(M + 1, x) with x = s^2 |h|^2 and P the regularized lower
    incomplete gamma function.
    """
    h = np.asarray(h, dtype=float)
    x = scale**2 * float(h @ h)
    prefactor = math.exp(x / 2.0)
    kernels = {0: DenseSymTensor.scalar_tensor(prefactor)}
    power = DenseSymTensor.scalar_tensor(1.0)
    vec = DenseSymTensor(h)
    for n in range(1, order + 1):
        power = DenseSymTensor(tensor_product(power, vec).coeffs)
        kernels[n] = power.scale(prefactor * scale**n / math.factorial(n))
    tail = math.exp(2.0 * x) * float(special.gammainc(order + 1, x)) if x > 0 else 0.0
    return TruncatedExpansion(ChaosExpansion(h.size, kernels), tail)
