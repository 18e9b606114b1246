"""Exact moment sums of Hermite variations over Toeplitz Gram matrices.

Every quantity here is a sum over increment indices whose summand
factorizes through rho(k - l). The double sums are Toeplitz quadratic
forms evaluated by FFT products; the quadruple sums are regrouped into
Hadamard products of R^2 and R^3 column blocks, R = (rho(k - l))_{k,l},
so no N x N matrix is ever held in memory.
"""

import logging
import math

import numpy as np

from ..exceptions import ContractionOrderError, ParameterRegionError
from ..tensor.gram import COLUMN_BLOCK, ToeplitzGram
from .covariance import check_hurst, increment_gram, rho
from .kernels import breuer_major_boundary

logger = logging.getLogger(__name__)


def _gram(H: float, N: int) -> tuple[ToeplitzGram, np.ndarray]:
    if N < 1:
        raise ParameterRegionError(f"N must be positive, got {N}")
    gram = increment_gram(H, N, check=False)
    return gram, gram.family_atoms(0)


def toeplitz_form(
    H: float, N: int, power: int, u: np.ndarray, v: np.ndarray | None = None
) -> float:
    """u^T (rho(k - l)^power)_{k,l < N} v."""
    gram, atoms = _gram(H, N)
    v = u if v is None else v
    v = np.asarray(v, dtype=float)
    return float(np.asarray(u) @ gram.power_matmul(atoms, atoms, power, v))


def lag_power_sum(H: float, N: int, power: int) -> float:
    """sum_{k,l < N} rho(k - l)^power = N + 2 sum_{v=1}^{N-1} (N - v) rho(v)^power."""
    check_hurst(H)
    lags = np.arange(1, N)
    values = (N - lags) * np.asarray(rho(H, lags)) ** power
    return math.fsum([float(N), 2.0 * math.fsum(values.tolist())])


def breuer_major_variance(H: float, N: int, p: int) -> float:
    """E V_N^2 = p! N^{-1} sum_{k,l} rho(k - l)^p."""
    return math.factorial(p) * lag_power_sum(H, N, p) / N


def hermite_variation_covariance(
    gram: ToeplitzGram, N: int, p: int, q: int, H_q: float, left: int = 0, right: int = 1
) -> float:
    """E X_N Y_N for X_N = I_p(f_N) on family ``left`` and Y_N = I_q(g_N) on ``right``.

    Equals p! N^{p(1-H_q)-3/2} sum_{k,l} c(k - l)^p when p = q, zero otherwise.
    """
    if p != q:
        return 0.0
    ones = np.ones(N)
    rows, cols = gram.family_atoms(left), gram.family_atoms(right)
    total = float(ones @ gram.power_matmul(rows, cols, p, ones))
    return math.factorial(p) * float(N) ** (p * (1.0 - H_q) - 1.5) * total


def exponential_covariance(H: float, N: int, p: int) -> float:
    """E[V_N e^{W(h_0)}] = sqrt(e) N^{-1/2} sum_{k<N} rho(k)^p."""
    check_hurst(H)
    values = np.asarray(rho(H, np.arange(N))) ** p
    return math.sqrt(math.e) * math.fsum(values.tolist()) / math.sqrt(N)


def exponential_pair_sum(H: float, N: int, r: int, p: int) -> float:
    """T(r, p, N) = N^{-1} sum_{k,l} rho(k - l)^r rho(k)^{p-r} rho(l)^{p-r}."""
    if not 0 <= r <= p:
        raise ContractionOrderError(f"Index r={r} outside [0, {p}]")
    u = np.asarray(rho(H, np.arange(N))) ** (p - r)
    return toeplitz_form(H, N, r, u) / N


def exponential_gamma_moment(H: float, N: int, p: int) -> float:
    """E<D(-L)^{-1} V_N, D e^{W(h_0)}>^2 in closed form.

    The pairing is N^{-1/2} e^{W(h_0)} sum_k rho(k) I_{p-1}(h_k^{(x)p-1}); a
    Cameron-Martin shift by 2 h_0 turns its second moment into
    e^2 sum_{r<p} r! C(p-1, r)^2 4^{p-1-r} T(r, p, N).
    """
    if p < 1:
        raise ContractionOrderError(f"Chaos order must be at least 1, got {p}")
    terms = [
        math.factorial(r)
        * math.comb(p - 1, r) ** 2
        * 4.0 ** (p - 1 - r)
        * exponential_pair_sum(H, N, r, p)
        for r in range(p)
    ]
    return math.e**2 * math.fsum(terms)


def check_central_noncentral_region(q: int, H: float) -> None:
    """H must lie in (3/4, 1 - 1/(2q)) with q >= 3."""
    if q < 3:
        raise ParameterRegionError(f"Central-noncentral pairs need q >= 3, got {q}")
    upper = breuer_major_boundary(q)
    if not 0.75 < H < upper:
        raise ParameterRegionError(f"H={H} outside (3/4, {upper:.4f}) for q={q}")


def derivative_pair_sums(
    H: float, N: int, q: int, block: int = COLUMN_BLOCK
) -> tuple[float, float, float]:
    """(a1, a2, a3) of the second moment of <DV_N, DU_N>.

    a1 = sum rho_ik^{q-1} rho_ij rho_kl rho_jl = sum_{i,k} rho_ik^{q-1} (R^3)_ik
    a2 = sum rho_ik^{q-2} rho_ij rho_kl rho_il rho_jk = sum_{i,k} rho_ik^{q-2} (R^2)_ik^2
    a3 = sum rho_ik^{q-2} rho_ij^2 rho_kl^2 = s^T R^{(q-2)} s, s_i = sum_j rho_ij^2
    """
    if q < 2:
        raise ContractionOrderError(f"Order q must be at least 2, got {q}")
    gram, atoms = _gram(H, N)
    a1_parts: list[float] = []
    a2_parts: list[float] = []
    for start in range(0, N, block):
        cols = atoms[start : start + block]
        columns = gram.submatrix(atoms, cols)
        square = gram.power_matmul(atoms, atoms, 1, columns)
        cube = gram.power_matmul(atoms, atoms, 1, square)
        a1_parts.append(float(np.sum(columns ** (q - 1) * cube)))
        a2_parts.append(float(np.sum(columns ** (q - 2) * square**2)))
    s = gram.power_matmul(atoms, atoms, 2, np.ones(N))
    a3 = float(s @ gram.power_matmul(atoms, atoms, q - 2, s))
    return math.fsum(a1_parts), math.fsum(a2_parts), a3


def derivative_pair_moment(
    H: float, N: int, q: int, sums: tuple[float, float, float] | None = None
) -> float:
    """E<DV_N, DU_N>^2 for V_N = I_q(f_N) and U_N = I_2(N^{1-2H} sum_k h_k^{(x)2}).

    Equals 4 q^2 (q-1)! N^{1-4H} (a1 + (q-1) a2 + (q-1) a3).
    """
    a1, a2, a3 = sums if sums is not None else derivative_pair_sums(H, N, q)
    prefactor = 4.0 * q * q * math.factorial(q - 1) * float(N) ** (1.0 - 4.0 * H)
    return prefactor * math.fsum([a1, (q - 1) * a2, (q - 1) * a3])


def _window_covariance(H: float, u: np.ndarray, m: int) -> np.ndarray:
    # <B_m - B_0, B_{u+1} - B_u> in unit-step increments
    two_h = 2.0 * H
    u = np.asarray(u, dtype=float)
    return 0.5 * (
        np.abs(u + 1.0) ** two_h
        - np.abs(u) ** two_h
        - np.abs(u + 1.0 - m) ** two_h
        + np.abs(u - m) ** two_h
    )


def rosenblatt_proxy_gap(H: float, N: int, M: int) -> float:
    """E(U_M - U_N)^2 with both statistics built from one fBm on [0, 1].

    U_n = n^{1-2H} sum_{k<n} ((n^H (B_{(k+1)/n} - B_{k/n}))^2 - 1), and M must
    be a multiple of N.
    """
    check_hurst(H)
    if M % N:
        raise ParameterRegionError(f"Proxy size M={M} must be a multiple of N={N}")
    m = M // N
    second_n = 2.0 * float(N) ** (2.0 - 4.0 * H) * lag_power_sum(H, N, 2)
    second_m = 2.0 * float(M) ** (2.0 - 4.0 * H) * lag_power_sum(H, M, 2)
    # cross Gram of coarse cell k and fine step l depends on u = l - k m only
    offsets = np.arange(-(M - 1), M)
    window = _window_covariance(H, offsets, m) ** 2
    prefix = np.concatenate([[0.0], np.cumsum(window)])
    k = np.arange(N)
    low = -k * m + (M - 1)
    high = (M - 1 - k * m) + (M - 1) + 1
    cross_sum = math.fsum((prefix[high] - prefix[low]).tolist())
    cross = 2.0 * float(N) * float(M) ** (1.0 - 4.0 * H) * cross_sum
    gap = second_n + second_m - 2.0 * cross
    logger.debug(f"E(U_M - U_N)^2 = {gap:.3e} for H={H}, N={N}, M={M}")
    return max(gap, 0.0)
