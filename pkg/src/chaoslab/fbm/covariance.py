"""Autocorrelation of fractional Gaussian noise and its cross-scale variants.

Unit increments L_k = B_{k+1} - B_k of a fractional Brownian motion with
Hurst index H have correlation

    rho_H(v) = (|v + 1|^{2H} + |v - 1|^{2H} - 2 |v|^{2H}) / 2.

Fractional Brownian motions driven by one white noise through the
moving-average kernel f_{t,H}(s) = d(H) ((t - s)_+^{H-1/2} - (-s)_+^{H-1/2})
have increment cross-covariances A rho_Hbar(v) + B tau_Hbar(v) with
Hbar = (H_i + H_j) / 2 and tau the odd counterpart of rho.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate, special

from ..exceptions import ParameterRegionError
from ..tensor.gram import ToeplitzGram

logger = logging.getLogger(__name__)

QUAD_LIMIT = 400


def check_hurst(H: float) -> None:
    if not 0.0 < H < 1.0:
        raise ParameterRegionError(f"Hurst index must lie in (0, 1), got {H}")


def rho(H: float, v: int | np.ndarray) -> float | np.ndarray:
    """Correlation of unit fGn increments at lag v (vectorized over v)."""
    check_hurst(H)
    v = np.abs(np.asarray(v, dtype=float))
    two_h = 2.0 * H
    value = 0.5 * (np.abs(v + 1.0) ** two_h + np.abs(v - 1.0) ** two_h - 2.0 * v**two_h)
    return float(value) if value.ndim == 0 else value


def tau(H: float, v: int | np.ndarray) -> float | np.ndarray:
    """Odd second difference (g(v + 1) + g(v - 1) - 2 g(v)) / 2.

    g(x) = sign(x) |x|^{2H}, or x log|x| when H = 1/2.
    """
    v = np.asarray(v, dtype=float)

    def g(x: np.ndarray) -> np.ndarray:
        ax = np.abs(x)
        if math.isclose(H, 0.5):
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.where(ax > 0.0, x * np.log(np.where(ax > 0.0, ax, 1.0)), 0.0)
        return np.sign(x) * ax ** (2.0 * H)

    value = 0.5 * (g(v + 1.0) + g(v - 1.0) - 2.0 * g(v))
    return float(value) if value.ndim == 0 else value


def rho_tail_constant(H: float) -> float:
    """C_H with rho_H(v) ~ C_H v^{2H-2} as v grows; C_H = H |2H - 1|."""
    check_hurst(H)
    return H * abs(2.0 * H - 1.0)


def mvn_normalizer_closed_form(H: float) -> float:
    """d(H) = sqrt(Gamma(2H + 1) sin(pi H)) / Gamma(H + 1/2)."""
    check_hurst(H)
    return math.sqrt(special.gamma(2.0 * H + 1.0) * math.sin(math.pi * H)) / special.gamma(
        H + 0.5
    )


@lru_cache(maxsize=64)
def mvn_normalizer(H: float) -> float:
    """d(H) making Var B_1 = 1, by quadrature of the moving-average kernel.

    int f_{1,H}^2 = 1 / (2H) + int_0^inf ((1 + u)^a - u^a)^2 du, a = H - 1/2.
    """
    check_hurst(H)
    a = H - 0.5
    if a == 0.0:
        return 1.0

    def integrand(u: float) -> float:
        return ((1.0 + u) ** a - u**a) ** 2

    head, _ = integrate.quad(integrand, 0.0, 1.0, limit=QUAD_LIMIT)
    tail, _ = integrate.quad(integrand, 1.0, np.inf, limit=QUAD_LIMIT)
    return 1.0 / math.sqrt(1.0 / (2.0 * H) + head + tail)


def _kernel(H: float, t: float, s: float) -> float:
    a = H - 0.5
    first = (t - s) ** a if t > s else 0.0
    second = (-s) ** a if s < 0.0 else 0.0
    return first - second


def _increment_cross_quad(Hi: float, Hj: float, v: int) -> float:
    # <L_{v,Hi}, L_{0,Hj}> by direct quadrature over the shared noise
    di, dj = mvn_normalizer(Hi), mvn_normalizer(Hj)

    def integrand(s: float) -> float:
        left = _kernel(Hi, v + 1.0, s) - _kernel(Hi, float(v), s)
        right = _kernel(Hj, 1.0, s) - _kernel(Hj, 0.0, s)
        return left * right

    breaks = sorted({float(v), float(v + 1), 0.0, 1.0})
    upper = min(breaks[-1], 1.0, float(v + 1))
    edges = [b for b in breaks if b <= upper]
    lower = edges[0] - 1.0
    total, _ = integrate.quad(integrand, -np.inf, lower, limit=QUAD_LIMIT)
    pieces = [lower, *edges]
    for left_edge, right_edge in zip(pieces[:-1], pieces[1:]):
        if right_edge > left_edge:
            part, _ = integrate.quad(integrand, left_edge, right_edge, limit=QUAD_LIMIT)
            total += part
    return di * dj * total


@lru_cache(maxsize=64)
def cross_constants(Hi: float, Hj: float) -> tuple[float, float]:
    """(A, B) with <L_{k+v,Hi}, L_{k,Hj}> = A rho_Hbar(v) + B tau_Hbar(v).

    A is the lag-0 cross-covariance, the constant D(H_i, H_j); B follows from lag 1.
    """
    check_hurst(Hi)
    check_hurst(Hj)
    if math.isclose(Hi, Hj):
        return 1.0, 0.0
    h_bar = 0.5 * (Hi + Hj)
    A = _increment_cross_quad(Hi, Hj, 0)
    c1 = _increment_cross_quad(Hi, Hj, 1)
    B = (c1 - A * rho(h_bar, 1)) / tau(h_bar, 1)
    logger.debug(f"Cross constants for ({Hi}, {Hj}): A={A:.6f}, B={B:.6f}")
    return A, B


def increment_cross_covariance(Hi: float, Hj: float, lags: int | np.ndarray) -> np.ndarray:
    """<L_{k+v,Hi}, L_{k,Hj}> for the given lags v."""
    lags = np.asarray(lags)
    A, B = cross_constants(Hi, Hj)
    h_bar = 0.5 * (Hi + Hj)
    return A * np.asarray(rho(h_bar, lags)) + B * np.asarray(tau(h_bar, lags))


@dataclass(frozen=True)
class CovarianceModel:
    """Stationary increment families with Hurst indices ``hursts``.

    A single index gives the plain fGn model; several indices model
    increments driven by one white noise.
    """

    hursts: tuple[float, ...]
    _lag_cache: dict[int, np.ndarray] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        hursts = tuple(float(h) for h in self.hursts)
        if not hursts:
            raise ParameterRegionError("CovarianceModel needs at least one Hurst index")
        for H in hursts:
            check_hurst(H)
        object.__setattr__(self, "hursts", hursts)

    @classmethod
    def single(cls, H: float) -> "CovarianceModel":
        return cls((H,))

    @property
    def H(self) -> float:
        return self.hursts[0]

    def rho(self, v: int | np.ndarray) -> float | np.ndarray:
        return rho(self.H, v)

    def cross_constant(self, i: int, j: int) -> float:
        """D(H_i, H_j), the lag-0 cross-covariance."""
        return cross_constants(self.hursts[i], self.hursts[j])[0]

    def lag_table(self, n: int) -> np.ndarray:
        """c_ab(v) for |v| < n as an (F, F, 2n - 1) array."""
        if n not in self._lag_cache:
            lags = np.arange(-(n - 1), n)
            families = len(self.hursts)
            table = np.empty((families, families, lags.size))
            for a, Ha in enumerate(self.hursts):
                table[a, a] = rho(Ha, lags)
                for b in range(a + 1, families):
                    table[a, b] = increment_cross_covariance(Ha, self.hursts[b], lags)
                    # c_ba(v) = c_ab(-v)
                    table[b, a] = table[a, b, ::-1]
            self._lag_cache[n] = table
        return self._lag_cache[n]

    def gram(self, n: int, check: bool = True) -> ToeplitzGram:
        """IncrementGram over n increments of every family."""
        return ToeplitzGram(self.lag_table(n), n, check=check)

    def tail_slope_check(self, lags: np.ndarray) -> float:
        """Log-log slope of |rho_H(v)| over ``lags``; tends to 2H - 2."""
        values = np.abs(np.asarray(self.rho(lags)))
        slope = np.polyfit(np.log(lags), np.log(values), 1)[0]
        return float(slope)


def increment_gram(H: float, n: int, check: bool = True) -> ToeplitzGram:
    """Gram matrix rho_H(k - l) of n unit increments."""
    return CovarianceModel.single(H).gram(n, check=check)
