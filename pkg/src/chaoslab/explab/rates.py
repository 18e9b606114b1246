"""Decay-rate fits and the exponents the asymptotic theory predicts."""

import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np
from scipy import stats

from ..exceptions import RateFitError

logger = logging.getLogger(__name__)

MIN_POINTS = 4
DEFAULT_SLOPE_TOLERANCE = 0.15


@dataclass(frozen=True)
class RateFit:
    """Least-squares line through (log2 N, log2 value)."""

    slope: float
    stderr: float
    intercept: float
    points: int

    def agrees_with(
        self, exponent: float, tolerance: float = DEFAULT_SLOPE_TOLERANCE
    ) -> bool:
        return abs(self.slope - exponent) <= tolerance

    def below(
        self, exponent: float, tolerance: float = DEFAULT_SLOPE_TOLERANCE
    ) -> bool:
        """Slope no larger than an envelope exponent, up to the tolerance."""
        return self.slope <= exponent + tolerance

    def to_dict(self) -> dict[str, float | int]:
        return {
            "slope": self.slope,
            "stderr": self.stderr,
            "intercept": self.intercept,
            "points": self.points,
        }


def rate_fit(table: Iterable[tuple[float, float]]) -> RateFit:
    """Fit value ~ c N^slope in log2-log2 coordinates.

    Args:
        table: (N, value) pairs, at least four, values positive

    Raises:
        RateFitError: On fewer than four points or non-positive entries
    """
    pairs = [(float(n), float(v)) for n, v in table]
    if len(pairs) < MIN_POINTS:
        raise RateFitError(f"Need at least {MIN_POINTS} points, got {len(pairs)}")
    ns = np.array([n for n, _ in pairs])
    values = np.array([v for _, v in pairs])
    if np.any(~np.isfinite(values)) or np.any(values <= 0.0) or np.any(ns <= 0.0):
        raise RateFitError("Rate fits need positive finite N and values")
    x, y = np.log2(ns), np.log2(values)
    if np.ptp(y) == 0.0:
        return RateFit(0.0, 0.0, float(y[0]), len(pairs))
    result = stats.linregress(x, y)
    fit = RateFit(
        float(result.slope), float(result.stderr), float(result.intercept), len(pairs)
    )
    logger.debug(f"Rate fit slope {fit.slope:.4f} +/- {fit.stderr:.4f} ({fit.points} points)")
    return fit


@dataclass(frozen=True)
class Prediction:
    """Predicted decay exponent with the branch of the theory it comes from.

    An ``envelope`` prediction is only an upper bound on the decay exponent:
    the measured slope may be steeper.
    """

    exponent: float
    branch: str
    envelope: bool = False

    def to_dict(self) -> dict[str, float | str | bool]:
        return {"exponent": self.exponent, "branch": self.branch, "envelope": self.envelope}


def joint_covariance_exponent(p: int, H0: float, Hj: float) -> Prediction:
    """Decay of |E X_N Y_N| for a Breuer-Major X_N and a non-central Y_N.

    (H0 + Hj - 2) p < -1: p(1 - Hj) - 1/2; equality adds a log factor;
    otherwise the larger of p(1 - Hj) - 3/2 and 1/2 - p(1 - H0).
    """
    level = (H0 + Hj - 2.0) * p
    if math.isclose(level, -1.0):
        return Prediction(p * (1.0 - Hj) - 0.5, "log")
    if level < -1.0:
        return Prediction(p * (1.0 - Hj) - 0.5, "summable")
    return Prediction(max(p * (1.0 - Hj) - 1.5, 0.5 - p * (1.0 - H0)), "long-memory")


def exponential_covariance_exponent() -> Prediction:
    return Prediction(-0.5, "summable")


def exponential_gamma_exponent(H: float) -> Prediction:
    """Decay of E<D(-L)^{-1} V_N, DY>^2, bounded by max(-1, 2H - 2).

    Up to H = 1/2 the exponent -1 is attained. Above it the N^{2H-2} term is
    only an upper bound: on practical schedules the r = 0 pairing sum
    4 (sum rho^2)^2 / N dominates and the fitted slope stays near -1.
    """
    if 2.0 * H - 2.0 > -1.0:
        return Prediction(2.0 * H - 2.0, "long-memory", envelope=True)
    return Prediction(-1.0, "short-memory")


def exponential_bound_exponent(p: int, H: float) -> Prediction:
    """Decay of the total distance bound for (V_N, e^{W(h_0)}).

    Above H = 1/2 the exponent comes from the pairing-moment envelope and
    is an upper bound only.
    """
    if H <= 0.5:
        return Prediction(-0.5, "short-memory")
    if H < 0.75:
        return Prediction(H - 1.0, "moderate", envelope=True)
    return Prediction(max(H - 1.0, p * H - p + 0.5), "long-memory", envelope=True)


def breuer_major_distance_exponent(q: int, H: float) -> Prediction:
    """Decay of d_W(V_N, Z) for the order-q Breuer-Major statistic."""
    if H <= (2.0 * q - 3.0) / (2.0 * q - 2.0):
        return Prediction(H - 1.0, "central")
    return Prediction(q * H - q + 0.5, "near-boundary")


def rosenblatt_distance_exponent(H: float) -> Prediction:
    """Decay of d_W(U_N, R): 3/2 - 2H."""
    return Prediction(1.5 - 2.0 * H, "rosenblatt")


def derivative_pair_exponent(q: int, H: float) -> Prediction:
    """Decay of E<DV_N, DU_N>^2.

    2H - 2 below 1 - 1/(2(q-1)), (2H - 2) q + 1 above it; for q = 3 the
    first branch is empty and the exponent is 6H - 5.
    """
    if H < 1.0 - 1.0 / (2.0 * (q - 1)):
        return Prediction(2.0 * H - 2.0, "central")
    return Prediction((2.0 * H - 2.0) * q + 1.0, "near-boundary")


def central_noncentral_bound_exponent(q: int, H: float) -> Prediction:
    """Decay of d_W((V_N, U_N), (Z, R)).

    For q = 3 the branches switch at H = 4/5; otherwise the slowest of the
    marginal rates and the square root of the derivative-pair rate.
    """
    if q == 3:
        if H < 0.8:
            return Prediction(1.5 - 2.0 * H, "rosenblatt")
        return Prediction(3.0 * H - 2.5, "near-boundary")
    parts = [
        breuer_major_distance_exponent(q, H).exponent,
        rosenblatt_distance_exponent(H).exponent,
        derivative_pair_exponent(q, H).exponent / 2.0,
    ]
    return Prediction(max(parts), "combined")


def fit_or_none(table: Sequence[tuple[float, float]]) -> RateFit | None:
    """rate_fit, or None when the values cannot be fitted (zeros, too few)."""
    try:
        return rate_fit(table)
    except RateFitError as e:
        logger.info(f"Skipping rate fit: {e}")
        return None
