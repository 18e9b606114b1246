"""Dependence between a diffusion and its driving noise.

X^lam_t = x0 + lam int_0^t b(X^lam_s) ds + W_t has Malliavin derivative
D_a X^lam_t = exp(lam int_a^t b'(X^lam_s) ds), and the distance of the law
of (X^lam_t, X^0_t) to the product of its marginals is at most
C int_0^t D_a X^lam_t da. With |b'| <= M the integral stays below
g(lam) = C (e^{M lam t} - 1) / (M lam) for lam >= 0.
"""

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from ...exceptions import StepSizeError
from ..config import SDEParams
from ..oracles import OracleCheck
from ..output import Row
from ..runner import Experiment, MonteCarloSummary, Point, RunContext, Summary, dependence_columns

logger = logging.getLogger(__name__)

# largest M |lam| t before exp overflows
EXPONENT_LIMIT = 700.0
SERIES_TERMS = 30
SERIES_LAMBDAS = (1e-3, -1e-3, 1e-6)
SERIES_TOLERANCE = 1e-12
VANISHING_LAMBDA = -1e8
VANISHING_TOLERANCE = 1e-6
X0_COMPONENT = 1


@dataclass(frozen=True)
class Drift:
    """Drift b with derivative b' and the bound M on |b'|."""

    name: str
    b: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[np.ndarray], np.ndarray]
    bound: float = 1.0


DRIFTS = {
    "tanh": Drift("tanh", np.tanh, lambda x: 1.0 - np.tanh(x) ** 2),
    "linear": Drift("linear", lambda x: x, np.ones_like),
}


def dependence_envelope(lam: float, constant: float, bound: float, t: float) -> float:
    """g(lam) = C (e^{M lam t} - 1) / (M lam), continued by C t at lam = 0."""
    rate = bound * lam
    if rate == 0.0:
        return constant * t
    return constant * math.expm1(rate * t) / rate


def envelope_series(lam: float, constant: float, bound: float, t: float, terms: int = SERIES_TERMS) -> float:
    """Taylor series C t sum_n (M lam t)^n / (n + 1)! of the envelope."""
    x = bound * lam * t
    return constant * t * math.fsum(x**n / math.factorial(n + 1) for n in range(terms))


def pathwise_integral(derivatives: np.ndarray, lam: float, dt: float) -> np.ndarray:
    """int_0^t D_a X_t da on the grid, one value per path.

    ``derivatives[:, j]`` holds b'(X_{t_j}); on [t_m, t_{m+1}] the
    derivative is exp(lam dt sum_{j > m} b'(X_{t_j})), a left-point sum
    that stays below the continuous integral for lam >= 0 and b' <= M.
    """
    tails = np.cumsum(derivatives[:, ::-1], axis=1)[:, ::-1] - derivatives
    return dt * np.exp(lam * dt * tails).sum(axis=1)


def geometric_integral(lam: float, steps: int, dt: float) -> float:
    """pathwise_integral for b' = 1 in closed form."""
    if lam == 0.0:
        return steps * dt
    return dt * math.expm1(lam * dt * steps) / math.expm1(lam * dt)


def euler_maruyama(
    drift: Drift, lam: float, x0: float, dt: float, noise: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """(X at the final time, b'(X) at every left grid point) for increments ``noise``."""
    x = np.full(noise.shape[0], x0, dtype=float)
    derivatives = np.empty_like(noise)
    for j in range(noise.shape[1]):
        derivatives[:, j] = drift.derivative(x)
        x = x + lam * drift.b(x) * dt + noise[:, j]
    return x, derivatives


class SDEExperiment(Experiment):
    """Malliavin-derivative integral, its envelope and the empirical gaps per lambda."""

    params_model = SDEParams
    params: SDEParams

    def __init__(self, params: SDEParams):
        super().__init__(params)
        self.drift = DRIFTS[params.drift]

    @property
    def columns(self) -> list[str]:
        return [
            "drift", "lambda", "t", "steps",
            "integral_mean", "integral_stderr", "envelope", "envelope_ratio",
            "strong_error",
            "gap", "gap_stderr", "baseline", "baseline_stderr",
            "gap_x0", "gap_x0_stderr",
            "error",
        ]  # fmt: skip

    def validate(self) -> list[str]:
        errors = []
        if not self.params.lambdas:
            errors.append("No lambda values given")
        for lam in self.params.lambdas:
            if abs(lam) * self.drift.bound * self.params.t > EXPONENT_LIMIT:
                errors.append(f"lambda={lam} overflows the envelope at t={self.params.t}")
        return errors

    def points(self) -> list[Point]:
        return [Point(i, {"lambda": lam}) for i, lam in enumerate(self.params.lambdas)]

    def simulate(self, point: Point, ctx: RunContext, lam: float, steps: int) -> np.ndarray:
        """Replicas x (X_t, W_t, pathwise integral, coarse X_t).

        The fine grid has 2 * steps cells; the coarse grid sums pairs of
        its increments, so both schemes see the same Brownian path.
        """
        params = self.params
        fine_dt = params.t / (2 * steps)

        def work(rng: np.random.Generator, size: int) -> np.ndarray:
            noise = rng.standard_normal((size, 2 * steps)) * math.sqrt(fine_dt)
            x_fine, derivatives = euler_maruyama(self.drift, lam, params.x0, fine_dt, noise)
            coarse_noise = noise.reshape(size, steps, 2).sum(axis=-1)
            x_coarse, _ = euler_maruyama(self.drift, lam, params.x0, 2.0 * fine_dt, coarse_noise)
            integral = pathwise_integral(derivatives, lam, fine_dt)
            return np.column_stack([x_fine, noise.sum(axis=1), integral, x_coarse])

        return ctx.pool.map_rows(work, params.replicas, ctx.seed, ctx.stream(point))

    def evaluate(self, point: Point, ctx: RunContext) -> list[Row]:
        lam = point.values["lambda"]
        params = self.params
        steps = params.steps * 2**ctx.refinement
        draws = self.simulate(point, ctx, lam, steps)
        X, W, integral, coarse = draws.T

        strong_error = float(np.sqrt(np.mean((X - coarse) ** 2)))
        if strong_error > params.strong_tolerance:
            raise StepSizeError(
                f"Strong error {strong_error:.3e} above {params.strong_tolerance} "
                f"with {steps} steps at lambda={lam}"
            )
        envelope = dependence_envelope(lam, params.bound_constant, self.drift.bound, params.t)
        summary = MonteCarloSummary.of(integral)
        joint = np.column_stack([X, W])
        self.last_sample = joint
        against_x0 = dependence_columns(
            ctx, point, np.column_stack([X, params.x0 + W]), component=X0_COMPONENT
        )
        logger.info(f"sde lambda={lam}: integral {summary.mean:.6f}, envelope {envelope:.6f}")
        return [
            {
                "drift": self.drift.name,
                "lambda": lam,
                "t": params.t,
                "steps": 2 * steps,
                "integral_mean": params.bound_constant * summary.mean,
                "integral_stderr": params.bound_constant * summary.stderr,
                "envelope": envelope,
                "envelope_ratio": params.bound_constant * summary.mean / envelope,
                "strong_error": strong_error,
                **dependence_columns(ctx, point, joint),
                "gap_x0": against_x0["gap"],
                "gap_x0_stderr": against_x0["gap_stderr"],
            }
        ]

    def summarize(self, rows: list[Row]) -> Summary:
        summary = Summary()
        done = sorted(
            (row for row in rows if math.isfinite(row.get("integral_mean", math.nan))),
            key=lambda row: row["lambda"],
        )
        means = [row["integral_mean"] for row in done]
        summary.checks["integral_monotone_in_lambda"] = all(
            a <= b for a, b in zip(means, means[1:])
        )
        # for lam >= 0 the envelope bounds every path
        summary.checks["envelope_holds"] = all(
            row["integral_mean"] <= row["envelope"] * (1.0 + 1e-12)
            for row in done
            if row["lambda"] >= 0.0
        )
        summary.checks["drift_free_integral_is_t"] = all(
            math.isclose(row["integral_mean"], self.params.bound_constant * row["t"], rel_tol=1e-12)
            for row in done
            if row["lambda"] == 0.0
        )
        return summary

    def self_check(self, ctx: RunContext) -> list[OracleCheck]:
        params = self.params
        C, M, t = params.bound_constant, self.drift.bound, params.t
        checks = [
            OracleCheck(
                f"envelope[lambda={lam}]",
                dependence_envelope(lam, C, M, t),
                envelope_series(lam, C, M, t),
                SERIES_TOLERANCE,
            )
            for lam in SERIES_LAMBDAS
        ]
        checks.append(OracleCheck("envelope[lambda=0]", dependence_envelope(0.0, C, M, t), C * t, 0.0))
        checks.append(
            OracleCheck(
                f"envelope[lambda={VANISHING_LAMBDA:g}]",
                dependence_envelope(VANISHING_LAMBDA, C, M, t),
                0.0,
                VANISHING_TOLERANCE,
            )
        )
        dt = t / params.steps
        ones = np.ones((1, params.steps))
        for lam in params.lambdas:
            checks.append(
                OracleCheck(
                    f"linear_drift_integral[lambda={lam}]",
                    float(pathwise_integral(ones, lam, dt)[0]),
                    geometric_integral(lam, params.steps, dt),
                )
            )
        return checks
