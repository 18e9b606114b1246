"""Kernels of Hermite variations of fractional Gaussian noise.

All kernels are rank-one sums over the increment atoms h_k of a Toeplitz
Gram matrix, so that V_N = I_p(f_N) is computed for N in the thousands
without ever materialising a tensor.
"""

import logging
import math

import numpy as np

from ..exceptions import ContractionOrderError, ParameterRegionError, QuadratureError
from ..tensor.gram import PSD_CHECK_LIMIT, RankOneSum, ToeplitzGram, rank_one_inner
from .covariance import check_hurst, increment_gram, rho, rho_tail_constant

logger = logging.getLogger(__name__)

SIGMA2_TOLERANCE = 1e-8
SIGMA2_START = 2**10
SIGMA2_MAX = 2**24
SERIES_BLOCK = 2**20


def _family_gram(H: float, N: int, gram: ToeplitzGram | None) -> ToeplitzGram:
    if N < 1:
        raise ParameterRegionError(f"N must be positive, got {N}")
    if gram is None:
        return increment_gram(H, N, check=N <= PSD_CHECK_LIMIT)
    if gram.n != N:
        raise ParameterRegionError(f"Gram holds {gram.n} increments per family, not {N}")
    return gram


def _uniform_kernel(
    H: float, N: int, order: int, weight: float, gram: ToeplitzGram | None, family: int
) -> RankOneSum:
    if order < 1:
        raise ContractionOrderError(f"Kernel order must be at least 1, got {order}")
    check_hurst(H)
    gram = _family_gram(H, N, gram)
    atoms = gram.family_atoms(family)
    return RankOneSum(order, np.full(N, weight), atoms, gram)


def breuer_major_kernel(
    H: float, N: int, p: int, gram: ToeplitzGram | None = None, family: int = 0
) -> RankOneSum:
    """f_N = N^{-1/2} sum_{k<N} h_k^{(x)p}, the kernel of the Breuer-Major statistic.

    Args:
        H: Hurst index of the increments
        N: Number of increments
        p: Chaos order
        gram: Shared Gram of several families; a single-family Gram by default
        family: Family index of the atoms inside ``gram``

    Returns:
        RankOneSum with V_N = I_p(f_N) = N^{-1/2} sum_k He_p(L_k)
    """
    return _uniform_kernel(H, N, p, N**-0.5, gram, family)


def hermite_variation_kernel(
    H: float, N: int, q: int, gram: ToeplitzGram | None = None, family: int = 0
) -> RankOneSum:
    """g_N = N^{q(1-H)-1} sum_{k<N} h_k^{(x)q}, normalised for the non-central regime."""
    return _uniform_kernel(H, N, q, float(N) ** (q * (1.0 - H) - 1.0), gram, family)


def rosenblatt_proxy_kernel(
    H: float, N: int, gram: ToeplitzGram | None = None, family: int = 0
) -> RankOneSum:
    """N^{1-2H} sum_{k<N} h_k^{(x)2}; I_2 of it is U_N = N^{1-2H} sum_k (L_k^2 - 1)."""
    return _uniform_kernel(H, N, 2, float(N) ** (1.0 - 2.0 * H), gram, family)


def pure_chaos_covariance(f: RankOneSum, g: RankOneSum) -> float:
    """E[I_p(f) I_q(g)]: p! <f, g> when p = q, zero across chaoses."""
    if f.order != g.order:
        return 0.0
    return math.factorial(f.order) * rank_one_inner(f, g)


def limit_self_similarity(q: int, H: float) -> float:
    """Self-similarity index 1 + q (H - 1) of the Hermite limit of order q."""
    check_hurst(H)
    return 1.0 + q * (H - 1.0)


def breuer_major_boundary(p: int) -> float:
    """Largest H (excluded) of the Breuer-Major regime of order p."""
    return 1.0 - 1.0 / (2.0 * p)


def _series_tail(p: int, H: float, V: int) -> float:
    # |rho(v)| <= C_H (v - 1)^{2H-2}, so sum_{v > V} |rho(v)|^p is at most
    # C_H^p (V^alpha + V^{alpha+1} / (-alpha - 1)) with alpha = (2H - 2) p < -1
    c = rho_tail_constant(H)
    if c == 0.0:
        return 0.0
    alpha = (2.0 * H - 2.0) * p
    return c**p * (V**alpha + V ** (alpha + 1.0) / (-alpha - 1.0))


def breuer_major_sigma2(p: int, H: float) -> tuple[float, float]:
    """Limit variance p! sum_{v in Z} rho_H(v)^p with a certified error.

    The series is summed up to V, doubling V from 2^10 until the analytic
    tail bound falls below 1e-8.

    Returns:
        (value, error bound)

    Raises:
        ParameterRegionError: If H >= 1 - 1/(2p)
        QuadratureError: If the tail bound is still too large at V = 2^24
    """
    if p < 1:
        raise ContractionOrderError(f"Chaos order must be at least 1, got {p}")
    check_hurst(H)
    if H >= breuer_major_boundary(p):
        raise ParameterRegionError(
            f"H={H} outside the Breuer-Major regime H < {breuer_major_boundary(p):.4f}"
        )
    scale = math.factorial(p)
    partial = [1.0]
    summed = 0
    V = SIGMA2_START
    while True:
        for start in range(summed + 1, V + 1, SERIES_BLOCK):
            lags = np.arange(start, min(start + SERIES_BLOCK, V + 1))
            partial.append(2.0 * math.fsum((np.asarray(rho(H, lags)) ** p).tolist()))
        summed = V
        error = scale * 2.0 * _series_tail(p, H, V)
        if error <= SIGMA2_TOLERANCE:
            value = scale * math.fsum(partial)
            logger.debug(f"sigma^2(p={p}, H={H}) = {value:.10f}, V={V}, error {error:.2e}")
            return value, error
        if V >= SIGMA2_MAX:
            raise QuadratureError(
                f"Breuer-Major series for p={p}, H={H} did not converge", error
            )
        V *= 2
