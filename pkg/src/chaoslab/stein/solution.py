"""Quadrature evaluation of the multidimensional Stein equation solution.

The equation sigma^2 d_x f(x, y) - x f(x, y) = h(x, y) - E h(Z, y), with
Z ~ N(0, sigma^2), has the bounded solution

    f_h(x, y) = -(1/sigma^2) int_0^1 (2 sqrt(t(1-t)))^{-1} E[Z h(sqrt(t) x + sqrt(1-t) Z, y)] dt.

With t = sin^2(theta) the endpoint singularities disappear:

    f_h(x, y) = -(1/sigma^2) int_0^{pi/2} E[Z h(sin(theta) x + cos(theta) Z, y)] d theta,

which is integrated by Gauss-Legendre in theta and Gauss-Hermite in Z.
Test functions take ``h(x, y)`` with x an array of any shape and y a
length-d vector, and must broadcast over x.
"""

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import hermite_e, legendre

from ..exceptions import QuadratureError
from .bounds import SteinTarget

logger = logging.getLogger(__name__)

TestFunction = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class QuadratureSettings:
    """Node counts and tolerances for the Stein solution evaluators."""

    hermite_nodes: int = 64
    outer_nodes: int = 128
    tolerance: float = 1e-8
    fd_step: float = 1e-4


@lru_cache(maxsize=16)
def _hermite_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    # nodes and weights for E[phi(xi)], xi ~ N(0, 1)
    nodes, weights = hermite_e.hermegauss(n)
    return nodes, weights / math.sqrt(2.0 * math.pi)


@lru_cache(maxsize=16)
def _legendre_rule(n: int, upper: float) -> tuple[np.ndarray, np.ndarray]:
    # nodes and weights on [0, upper]
    nodes, weights = legendre.leggauss(n)
    return 0.5 * upper * (nodes + 1.0), 0.5 * upper * weights


def _as_vector(y: np.ndarray | list[float] | float) -> np.ndarray:
    return np.atleast_1d(np.asarray(y, dtype=float))


def _solution_integral(
    h: TestFunction,
    x: float,
    y: np.ndarray,
    sigma: float,
    outer: int,
    inner: int,
) -> float:
    theta, w_theta = _legendre_rule(outer, math.pi / 2.0)
    xi, w_xi = _hermite_rule(inner)
    z = sigma * xi
    args = np.sin(theta)[:, None] * x + np.cos(theta)[:, None] * z[None, :]
    values = np.asarray(h(args, y), dtype=float)
    expectations = (values * z[None, :]) @ w_xi
    return -float(expectations @ w_theta) / sigma**2


def _derivative_integral(
    h_x: TestFunction,
    x: float,
    y: np.ndarray,
    sigma: float,
    outer: int,
    inner: int,
) -> float:
    # d_x f_h = -(1/sigma^2) int_0^{pi/2} sin(theta) E[Z d_x h(sin(theta) x + cos(theta) Z, y)]
    theta, w_theta = _legendre_rule(outer, math.pi / 2.0)
    xi, w_xi = _hermite_rule(inner)
    z = sigma * xi
    args = np.sin(theta)[:, None] * x + np.cos(theta)[:, None] * z[None, :]
    values = np.asarray(h_x(args, y), dtype=float)
    expectations = (values * z[None, :]) @ w_xi
    return -float((np.sin(theta) * expectations) @ w_theta) / sigma**2


def _with_error_check(
    integral: Callable[[int, int], float], settings: QuadratureSettings, what: str
) -> float:
    full = integral(settings.outer_nodes, settings.hermite_nodes)
    half = integral(max(settings.outer_nodes // 2, 2), max(settings.hermite_nodes // 2, 2))
    estimate = abs(full - half)
    if estimate > settings.tolerance * max(1.0, abs(full)):
        raise QuadratureError(f"{what} did not converge", estimate)
    return full


def stein_solution_eval(
    h: TestFunction,
    x: float,
    y: np.ndarray | list[float] | float,
    target: SteinTarget,
    settings: QuadratureSettings | None = None,
) -> float:
    """f_h(x, y) by Gauss-Legendre in theta and Gauss-Hermite in Z.

    Raises:
        QuadratureError: If halving the node counts moves the value by more
            than the tolerance
    """
    settings = settings or QuadratureSettings()
    y = _as_vector(y)
    return _with_error_check(
        lambda outer, inner: _solution_integral(h, x, y, target.sigma, outer, inner),
        settings,
        "Stein solution",
    )


def stein_solution_derivative(
    h_x: TestFunction,
    x: float,
    y: np.ndarray | list[float] | float,
    target: SteinTarget,
    settings: QuadratureSettings | None = None,
) -> float:
    """d_x f_h(x, y) from the partial derivative ``h_x`` of the test function."""
    settings = settings or QuadratureSettings()
    y = _as_vector(y)
    return _with_error_check(
        lambda outer, inner: _derivative_integral(h_x, x, y, target.sigma, outer, inner),
        settings,
        "Stein solution derivative",
    )


def stein_solution_from_derivative(
    h_x: TestFunction,
    x: float,
    y: np.ndarray | list[float] | float,
    target: SteinTarget,
    settings: QuadratureSettings | None = None,
) -> float:
    """f_h via the derivative form f_h = -int_0^1 E[d_x h(s x + sqrt(1 - s^2) Z, y)] ds.

    Gaussian integration by parts turns the Z-weighted form into this one;
    both must agree and serve as cross-checks of each other.
    """
    settings = settings or QuadratureSettings()
    y = _as_vector(y)
    sigma = target.sigma

    def integral(outer: int, inner: int) -> float:
        s, w_s = _legendre_rule(outer, 1.0)
        xi, w_xi = _hermite_rule(inner)
        args = s[:, None] * x + np.sqrt(1.0 - s**2)[:, None] * (sigma * xi)[None, :]
        values = np.asarray(h_x(args, y), dtype=float)
        return -float((values @ w_xi) @ w_s)

    return _with_error_check(integral, settings, "Stein solution (derivative form)")


def gaussian_expectation(
    h: TestFunction, y: np.ndarray, target: SteinTarget, nodes: int = 64
) -> float:
    """E h(Z, y) with Z ~ N(0, sigma^2)."""
    xi, w_xi = _hermite_rule(nodes)
    return float(np.asarray(h(target.sigma * xi, _as_vector(y)), dtype=float) @ w_xi)


def stein_residual(
    h: TestFunction,
    x: float,
    y: np.ndarray | list[float] | float,
    target: SteinTarget,
    settings: QuadratureSettings | None = None,
) -> float:
    """|sigma^2 d_x f_h - x f_h - (h(x, y) - E h(Z, y))| with a central difference for d_x f_h."""
    settings = settings or QuadratureSettings()
    y = _as_vector(y)
    step = settings.fd_step
    f_plus = stein_solution_eval(h, x + step, y, target, settings)
    f_minus = stein_solution_eval(h, x - step, y, target, settings)
    f_mid = stein_solution_eval(h, x, y, target, settings)
    dfdx = (f_plus - f_minus) / (2.0 * step)
    h_xy = float(np.asarray(h(np.asarray(x, dtype=float), y), dtype=float))
    mean = gaussian_expectation(h, y, target, settings.hermite_nodes)
    return abs(target.sigma2 * dfdx - x * f_mid - (h_xy - mean))


@dataclass(frozen=True)
class SteinBoundCheck:
    """Largest observed ratios of |f_h|, |d_x f_h|, |d_y f_h| to their bounds."""

    value_ratio: float
    x_derivative_ratio: float
    y_derivative_ratio: float

    def holds(self, slack: float = 1e-6) -> bool:
        return max(self.value_ratio, self.x_derivative_ratio, self.y_derivative_ratio) <= (
            1.0 + slack
        )


def check_solution_bounds(
    h: TestFunction,
    h_x: TestFunction,
    xs: np.ndarray,
    ys: np.ndarray,
    sup_hx: float,
    sup_hy: np.ndarray | list[float],
    target: SteinTarget,
    settings: QuadratureSettings | None = None,
) -> SteinBoundCheck:
    """Compare f_h and its partial derivatives on a grid with their sup bounds.

    |f_h| <= |d_x h|_inf, |d_x f_h| <= sqrt(2/pi) |d_x h|_inf / sigma and
    |d_{y_j} f_h| <= sqrt(pi/2) |d_{y_j} h|_inf / sigma. The y-derivative
    is taken by central differences.

    Args:
        h: Test function
        h_x: Its partial derivative in x
        xs: Grid of x values
        ys: Grid of y vectors, shape (k, d)
        sup_hx: Sup norm of d_x h
        sup_hy: Sup norms of d_{y_j} h, one per coordinate
        target: Gaussian target
        settings: Quadrature settings
    """
    settings = settings or QuadratureSettings()
    ys = np.atleast_2d(np.asarray(ys, dtype=float))
    sup_hy = np.atleast_1d(np.asarray(sup_hy, dtype=float))
    sigma = target.sigma
    step = settings.fd_step
    value_bound = sup_hx
    dx_bound = math.sqrt(2.0 / math.pi) * sup_hx / sigma
    dy_bounds = math.sqrt(math.pi / 2.0) * sup_hy / sigma

    value_ratio = dx_ratio = dy_ratio = 0.0
    for y in ys:
        for x in np.asarray(xs, dtype=float):
            f = stein_solution_eval(h, float(x), y, target, settings)
            dfdx = stein_solution_derivative(h_x, float(x), y, target, settings)
            value_ratio = max(value_ratio, _ratio(f, value_bound))
            dx_ratio = max(dx_ratio, _ratio(dfdx, dx_bound))
            for j in range(y.size):
                shift = np.zeros_like(y)
                shift[j] = step
                dfdy = (
                    stein_solution_eval(h, float(x), y + shift, target, settings)
                    - stein_solution_eval(h, float(x), y - shift, target, settings)
                ) / (2.0 * step)
                dy_ratio = max(dy_ratio, _ratio(dfdy, float(dy_bounds[j])))
    logger.debug(
        f"Stein solution bound ratios: value {value_ratio:.3f}, "
        f"d_x {dx_ratio:.3f}, d_y {dy_ratio:.3f}"
    )
    return SteinBoundCheck(value_ratio, dx_ratio, dy_ratio)


def _ratio(value: float, bound: float) -> float:
    if bound <= 0.0:
        return 0.0 if abs(value) <= 1e-12 else math.inf
    return abs(value) / bound
