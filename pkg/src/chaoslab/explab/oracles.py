"""Brute-force oracles for the exact-moment columns.

Each oracle recomputes a quantity from its defining nested sum, or from
dense chaos algebra on a tiny space, without the Toeplitz regrouping the
experiments use. They are only meant for small N (the quadruple sums loop
over one index and broadcast the other three, so N <= 48 is the practical
limit).
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from ..chaos.expansion import ChaosExpansion, covariance, exponential_expansion, multiply
from ..exceptions import ParameterRegionError, SelfCheckError
from ..fbm.covariance import increment_cross_covariance, increment_gram, rho
from ..fbm.kernels import breuer_major_kernel
from ..stein.gamma import gamma_second_moment
from ..tensor.dense import symmetrize, tensor_product

logger = logging.getLogger(__name__)

ORACLE_LIMIT = 48
DEFAULT_TOLERANCE = 1e-9


@dataclass(frozen=True)
class OracleCheck:
    """One exact column compared with its oracle at a small N."""

    name: str
    value: float
    oracle: float
    tolerance: float = DEFAULT_TOLERANCE

    @property
    def error(self) -> float:
        return abs(self.value - self.oracle) / max(1.0, abs(self.oracle))

    @property
    def passed(self) -> bool:
        return self.error <= self.tolerance

    def to_dict(self) -> dict[str, object]:
        return {
            "name": self.name,
            "value": self.value,
            "oracle": self.oracle,
            "relative_error": self.error,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def require_all(checks: list[OracleCheck]) -> None:
    """Raise SelfCheckError naming every failed check."""
    failed = [check for check in checks if not check.passed]
    for check in checks:
        logger.debug(f"Oracle {check.name}: {check.value!r} vs {check.oracle!r}")
    if failed:
        details = "; ".join(
            f"{c.name}: {c.value:.12e} vs oracle {c.oracle:.12e}" for c in failed
        )
        raise SelfCheckError(f"{len(failed)} self-check(s) failed: {details}")


def _check_size(N: int) -> None:
    if not 1 <= N <= ORACLE_LIMIT:
        raise ParameterRegionError(f"Oracles run for 1 <= N <= {ORACLE_LIMIT}, got {N}")


def _rho_matrix(H: float, N: int) -> np.ndarray:
    k = np.arange(N)
    return np.asarray(rho(H, np.subtract.outer(k, k)), dtype=float)


def joint_covariance_loop(H0: float, Hj: float, N: int, p: int, q: int) -> float:
    """E X_N Y_N from the double sum over increment pairs."""
    _check_size(N)
    if p != q:
        return 0.0
    total = 0.0
    for k in range(N):
        for l in range(N):
            total += float(increment_cross_covariance(H0, Hj, k - l)) ** p
    return math.factorial(p) * float(N) ** (p * (1.0 - Hj) - 1.5) * total


def breuer_major_variance_loop(H: float, N: int, p: int) -> float:
    _check_size(N)
    total = 0.0
    for k in range(N):
        for l in range(N):
            total += float(rho(H, k - l)) ** p
    return math.factorial(p) * total / N


def exponential_covariance_loop(H: float, N: int, p: int) -> float:
    _check_size(N)
    return math.sqrt(math.e) * sum(float(rho(H, k)) ** p for k in range(N)) / math.sqrt(N)


def exponential_pair_sum_loop(H: float, N: int, r: int, p: int) -> float:
    """T(r, p, N) by its double sum."""
    _check_size(N)
    total = 0.0
    for k in range(N):
        for l in range(N):
            total += (
                float(rho(H, k - l)) ** r
                * float(rho(H, k)) ** (p - r)
                * float(rho(H, l)) ** (p - r)
            )
    return total / N


def exponential_dense_moments(
    H: float, N: int, p: int, order: int = 12
) -> tuple[float, float]:
    """(E V_N e^{W(h_0)}, E<D(-L)^{-1} V_N, D e^{W(h_0)}>^2) from dense chaos algebra.

    V_N is densified through a Cholesky embedding of the increment Gram
    and the exponential is truncated after ``order``; the covariance is
    exact once order >= p, the Gamma moment carries the truncation error.
    """
    gram = increment_gram(H, N)
    embedding = gram.cholesky_embedding()
    V = ChaosExpansion.pure(breuer_major_kernel(H, N, p, gram).densify(embedding))
    Y = exponential_expansion(embedding[0], order).expansion
    cap = p + order
    return covariance(V, Y), gamma_second_moment(V, Y, order_cap=cap)


def derivative_pair_loop(H: float, N: int, q: int) -> tuple[float, float, float]:
    """(a1, a2, a3) summed over all four indices.

    a1 = sum rho_ik^{q-1} rho_ij rho_kl rho_jl
    a2 = sum rho_ik^{q-2} rho_ij rho_kl rho_il rho_jk
    a3 = sum rho_ik^{q-2} rho_ij^2 rho_kl^2
    """
    _check_size(N)
    R = _rho_matrix(H, N)
    a1 = a2 = a3 = 0.0
    # axes (j, k, l)
    for i in range(N):
        rik = R[i][None, :, None]
        rij = R[i][:, None, None]
        ril = R[i][None, None, :]
        rkl = R[None, :, :]
        rjl = R[:, None, :]
        rjk = R[:, :, None]
        a1 += float(np.sum(rik ** (q - 1) * rij * rkl * rjl))
        a2 += float(np.sum(rik ** (q - 2) * rij * rkl * ril * rjk))
        a3 += float(np.sum(rik ** (q - 2) * rij**2 * rkl**2))
    return a1, a2, a3


def self_contraction_loop(H: float, N: int) -> float:
    """|f_N (x)_1 f_N|^2 for the order-2 Breuer-Major kernel.

    sum_{i,j,k,l} rho_ij rho_kl rho_ik rho_jl / N^2.
    """
    _check_size(N)
    R = _rho_matrix(H, N)
    total = 0.0
    for i in range(N):
        # axes (j, k, l)
        rij = R[i][:, None, None]
        rik = R[i][None, :, None]
        total += float(np.sum(rij * R[None, :, :] * rik * R[:, None, :]))
    return total / N**2


def counterexample_dense_moments(H: float, N: int, p: int = 2) -> tuple[float, float]:
    """(E R^2, E Y^2) for X = I_p(f_N), Y = I_{2p}(f_N (x)~ f_N), R = X^2 - E X^2 - Y.

    Everything is computed with dense tensors, so keep N p small.
    """
    gram = increment_gram(H, N)
    f = breuer_major_kernel(H, N, p, gram).densify(gram.cholesky_embedding())
    X = ChaosExpansion.pure(f)
    square = multiply(X, X, order_cap=2 * p)
    Y = ChaosExpansion.pure(symmetrize(tensor_product(f, f)))
    R = square - ChaosExpansion.constant(N, square.mean) - Y
    return covariance(R, R) + R.mean**2, covariance(Y, Y)


def rosenblatt_proxy_gap_loop(H: float, N: int, M: int) -> float:
    """E(U_M - U_N)^2 with the coarse increments summed from the fine ones."""
    if M % N:
        raise ParameterRegionError(f"M={M} must be a multiple of N={N}")
    _check_size(N)
    m = M // N
    fine = _rho_matrix(H, M)
    # coarse unit increment k = (N/M)^H * sum of the fine unit increments in block k
    blocks = np.zeros((N, M))
    for k in range(N):
        blocks[k, k * m : (k + 1) * m] = (N / M) ** H
    cross = blocks @ fine
    coarse = cross @ blocks.T
    scale_n, scale_m = float(N) ** (1.0 - 2.0 * H), float(M) ** (1.0 - 2.0 * H)
    second_n = 2.0 * scale_n**2 * float(np.sum(coarse**2))
    second_m = 2.0 * scale_m**2 * float(np.sum(fine**2))
    mixed = 2.0 * scale_n * scale_m * float(np.sum(cross**2))
    return second_n + second_m - 2.0 * mixed
