"""Quadratic-variation estimators of the Hurst index.

S_N = (1/N) sum_k (B_{(k+1)/N} - B_{k/N})^2 has mean N^{-2H}, and
H_N = -log(S_N) / (2 log N) is consistent. The fluctuations of H_N are
Gaussian for H <= 3/4 and of Rosenblatt type above, which shows in the
kurtosis of the scaled errors.
"""

import logging
import math

import numpy as np
from scipy import stats

from ...fbm.correlated import sample_correlated_fgn
from ...fbm.sampling import sample_fgn
from ..config import HurstParams
from ..oracles import OracleCheck
from ..output import Row
from ..runner import (
    STREAMS_PER_POINT,
    Experiment,
    MonteCarloSummary,
    Point,
    RunContext,
    Summary,
    dependence_columns,
    fit_column,
    rows_where,
)

logger = logging.getLogger(__name__)

CENTRAL_LIMIT = 0.75
KURTOSIS_FLOOR = 0.5
SAMPLE_BUDGET = 2**23
ORACLE_TOLERANCE = 1e-12


def expected_quadratic_variation(H: float, N: int) -> float:
    """E S_N from the covariance R(s, t) = (s^{2H} + t^{2H} - |t - s|^{2H}) / 2."""
    grid = np.arange(N + 1) / N
    s, t = grid[:-1], grid[1:]
    two_h = 2.0 * H
    cov = 0.5 * (s**two_h + t**two_h - np.abs(t - s) ** two_h)
    increments = t**two_h + s**two_h - 2.0 * cov
    return math.fsum(increments.tolist()) / N


def quadratic_variation(increments: np.ndarray, H: float) -> np.ndarray:
    """S_N per row of unit-variance increments L_k of index H."""
    N = increments.shape[-1]
    return float(N) ** (-2.0 * H) * np.mean(increments**2, axis=-1)


def hurst_estimate(S: np.ndarray, N: int) -> np.ndarray:
    return -np.log(S) / (2.0 * math.log(N))


def scaled_error(estimate: np.ndarray, H: float, N: int) -> tuple[np.ndarray, str]:
    """2 sqrt(N) (H_N - H) up to 3/4, 2 N^{2-2H} (H_N - H) above."""
    if H <= CENTRAL_LIMIT:
        return 2.0 * math.sqrt(N) * (estimate - H), "central"
    return 2.0 * float(N) ** (2.0 - 2.0 * H) * (estimate - H), "non-central"


class HurstExperiment(Experiment):
    """Bias, variance and scaled-error law of H_N for every H and N."""

    params_model = HurstParams
    params: HurstParams

    @property
    def columns(self) -> list[str]:
        return [
            "H", "N", "correlated",
            "mean_S", "expected_S", "bias", "bias_stderr", "variance",
            "regime", "scaled_mean", "scaled_variance", "excess_kurtosis",
            "gap", "gap_stderr", "baseline", "baseline_stderr",
            "error",
        ]  # fmt: skip

    def validate(self) -> list[str]:
        errors = [f"Hurst index {H} outside (0, 1)" for H in self.params.H if not 0.0 < H < 1.0]
        if self.params.schedule[0] < 2:
            errors.append("Schedule must start at N >= 2 for log N > 0")
        return errors

    def points(self) -> list[Point]:
        return [Point(i, {"N": N}) for i, N in enumerate(self.params.schedule)]

    def failed_rows(self, point: Point, error: Exception) -> list[Row]:
        rows = []
        for H in self.params.H:
            row = super().failed_rows(point, error)[0]
            row["H"] = H
            rows.append(row)
        return rows

    def quadratic_variations(self, point: Point, ctx: RunContext, N: int) -> np.ndarray:
        """(len(H), replicas) values of S_N, sampled in batches of replicas."""
        hursts = self.params.H
        families = len(hursts)
        count = self.params.replicas
        slots = (STREAMS_PER_POINT - 1) // families
        batch = max(SAMPLE_BUDGET // (N * families), math.ceil(count / slots), 1)
        parts = []
        for b, start in enumerate(range(0, count, batch)):
            size = min(batch, count - start)
            if self.params.correlated:
                paths = sample_correlated_fgn(
                    hursts, N, size, ctx.seed, ctx.stream(point, 1 + b), ctx.pool
                )
            else:
                paths = np.stack(
                    [
                        sample_fgn(H, N, size, ctx.seed, ctx.stream(point, 1 + b * families + i), ctx.pool)
                        for i, H in enumerate(hursts)
                    ]
                )
            parts.append(np.stack([quadratic_variation(paths[i], H) for i, H in enumerate(hursts)]))
        return np.concatenate(parts, axis=1)

    def evaluate(self, point: Point, ctx: RunContext) -> list[Row]:
        N = point.values["N"]
        S = self.quadratic_variations(point, ctx, N)
        estimates = hurst_estimate(S, N)
        scaled = []
        rows = []
        for i, H in enumerate(self.params.H):
            errors, regime = scaled_error(estimates[i], H, N)
            scaled.append(errors)
            bias = MonteCarloSummary.of(estimates[i] - H)
            rows.append(
                {
                    "H": H,
                    "N": N,
                    "correlated": self.params.correlated,
                    "mean_S": float(np.mean(S[i])),
                    "expected_S": float(N) ** (-2.0 * H),
                    "bias": bias.mean,
                    "bias_stderr": bias.stderr,
                    "variance": float(np.var(estimates[i], ddof=1)),
                    "regime": regime,
                    "scaled_mean": float(np.mean(errors)),
                    "scaled_variance": float(np.var(errors, ddof=1)),
                    "excess_kurtosis": float(stats.kurtosis(errors)),
                }
            )
        self.last_sample = np.column_stack(scaled)
        if self.params.correlated:
            # dependence of every scaled error on the first one
            for i in range(1, len(rows)):
                joint = np.column_stack([scaled[0], scaled[i]])
                rows[i].update(dependence_columns(ctx, point, joint, component=i))
        logger.info(f"hurst N={N}: biases {[round(row['bias'], 5) for row in rows]}")
        return rows

    def summarize(self, rows: list[Row]) -> Summary:
        summary = Summary()
        largest = self.params.schedule[-1]
        for H in self.params.H:
            component = rows_where(rows, H=H)
            summary.add_rate(f"variance_H{H}", fit_column(component, "variance"))
            summary.add_rate(f"abs_bias_H{H}", fit_column(component, "bias", absolute=True))
            last = rows_where(component, N=largest)
            kurtosis = last[0]["excess_kurtosis"] if last else math.nan
            summary.checks[f"excess_kurtosis_H{H}"] = kurtosis if math.isfinite(kurtosis) else None
            if H > CENTRAL_LIMIT and math.isfinite(kurtosis):
                summary.checks[f"non_gaussian_H{H}"] = kurtosis > KURTOSIS_FLOOR
        return summary

    def self_check(self, ctx: RunContext) -> list[OracleCheck]:
        return [
            OracleCheck(
                f"expected_S[H={H}, N={N}]",
                float(N) ** (-2.0 * H),
                expected_quadratic_variation(H, N),
                ORACLE_TOLERANCE,
            )
            for H in self.params.H
            for N in self.params.schedule
        ]
