"""A Breuer-Major statistic against a variable with an infinite chaos expansion.

V_N = N^{-1/2} sum_k He_p(L_k) is paired with Y = e^{W(h_0)}, the
exponential of the first increment, whose expansion never terminates. The
covariance decays like N^{-1/2} and the pairing moment
E<D(-L)^{-1} V_N, DY>^2 stays below C (N^{-1} + N^{2H-2}).
"""

import logging
import math

import numpy as np

from ...chaos.expansion import exponential_expansion
from ...chaos.hermite import probabilists_table
from ...exceptions import QuadratureError
from ...fbm.kernels import breuer_major_boundary, breuer_major_kernel, breuer_major_sigma2
from ...fbm.moments import (
    breuer_major_variance,
    exponential_covariance,
    exponential_gamma_moment,
    exponential_pair_sum,
)
from ...fbm.sampling import sample_fgn
from ...stein.bounds import BoundReport, SteinTarget, stein_bound_from_kernels
from ..config import InfiniteChaosParams
from ..oracles import (
    ORACLE_LIMIT,
    OracleCheck,
    breuer_major_variance_loop,
    exponential_covariance_loop,
    exponential_dense_moments,
    exponential_pair_sum_loop,
)
from ..output import Row
from ..rates import (
    exponential_bound_exponent,
    exponential_covariance_exponent,
    exponential_gamma_exponent,
)
from ..runner import (
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

COVARIANCE_SLOPE_TOLERANCE = 0.1
DENSE_CHECK_N = 2
DENSE_GAMMA_TOLERANCE = 1e-5


class InfiniteChaosExperiment(Experiment):
    """Exact moments of (V_N, e^{W(h_0)}) with Monte-Carlo gaps."""

    params_model = InfiniteChaosParams
    params: InfiniteChaosParams

    def __init__(self, params: InfiniteChaosParams):
        super().__init__(params)
        # |h_0| = 1, so the tail of Y does not depend on N or H
        self.y_tail_mass = exponential_expansion(np.ones(1), params.expansion_order).tail_mass

    @property
    def pair_columns(self) -> list[str]:
        return [f"T_{r}" for r in range(self.params.p)]

    @property
    def columns(self) -> list[str]:
        return [
            "p", "H", "N",
            "cov_exact", *self.pair_columns,
            "gamma_moment", "envelope", "envelope_ratio",
            "var_v", "sigma2_target", "bound_self", "bound_total", "y_tail_mass",
            "mc_cov", "mc_cov_stderr",
            "gap", "gap_stderr", "baseline", "baseline_stderr",
            "error",
        ]  # fmt: skip

    def validate(self) -> list[str]:
        errors = []
        boundary = breuer_major_boundary(self.params.p)
        for H in self.params.H:
            if not 0.0 < H < boundary:
                errors.append(f"H={H} outside (0, {boundary:.4f}) for p={self.params.p}")
        return errors

    def points(self) -> list[Point]:
        return [
            Point(i * len(self.params.schedule) + k, {"H": H, "N": N})
            for i, H in enumerate(self.params.H)
            for k, N in enumerate(self.params.schedule)
        ]

    def exact_columns(self, H: float, N: int) -> Row:
        p = self.params.p
        gamma_moment = exponential_gamma_moment(H, N, p)
        envelope = 1.0 / N + float(N) ** (2.0 * H - 2.0)
        var_v = breuer_major_variance(H, N, p)
        try:
            sigma2 = breuer_major_sigma2(p, H)[0]
        except QuadratureError as e:
            logger.info(f"Using the finite-N variance as target: {e}")
            sigma2 = var_v
        self_part = stein_bound_from_kernels(breuer_major_kernel(H, N, p), [], SteinTarget(sigma2))
        report = BoundReport(
            self_part.gamma_self_l2, (math.sqrt(gamma_moment),), exact=self_part.exact
        )
        row: Row = {"p": p, "H": H, "N": N, "cov_exact": exponential_covariance(H, N, p)}
        for r, column in enumerate(self.pair_columns):
            row[column] = exponential_pair_sum(H, N, r, p)
        row.update(
            {
                "gamma_moment": gamma_moment,
                "envelope": envelope,
                "envelope_ratio": gamma_moment / envelope,
                "var_v": var_v,
                "sigma2_target": sigma2,
                "bound_self": report.gamma_self_l2,
                "bound_total": report.total,
                "y_tail_mass": self.y_tail_mass,
            }
        )
        return row

    def monte_carlo_columns(self, point: Point, ctx: RunContext, H: float, N: int) -> Row:
        p = self.params.p
        paths = sample_fgn(H, N, self.params.replicas, ctx.seed, ctx.stream(point), ctx.pool)
        V = probabilists_table(paths, p)[..., p].sum(axis=-1) / math.sqrt(N)
        Y = np.exp(paths[:, 0])
        joint = np.column_stack([V, Y])
        self.last_sample = joint
        covariance = MonteCarloSummary.of(V * Y)
        return {
            "mc_cov": covariance.mean,
            "mc_cov_stderr": covariance.stderr,
            **dependence_columns(ctx, point, joint),
        }

    def evaluate(self, point: Point, ctx: RunContext) -> list[Row]:
        H, N = point.values["H"], point.values["N"]
        row = self.exact_columns(H, N)
        if N in self.params.mc_schedule:
            row.update(self.monte_carlo_columns(point, ctx, H, N))
        logger.info(f"infinite-chaos H={H} N={N}: gamma moment {row['gamma_moment']:.6e}")
        return [row]

    def summarize(self, rows: list[Row]) -> Summary:
        summary = Summary()
        p, tolerance = self.params.p, self.params.slope_tolerance
        for H in self.params.H:
            component = rows_where(rows, H=H)
            summary.add_rate(
                f"cov_H{H}",
                fit_column(component, "cov_exact"),
                exponential_covariance_exponent(),
                COVARIANCE_SLOPE_TOLERANCE,
            )
            summary.add_rate(
                f"gamma_moment_H{H}",
                fit_column(component, "gamma_moment"),
                exponential_gamma_exponent(H),
                tolerance,
            )
            summary.add_rate(
                f"bound_total_H{H}",
                fit_column(component, "bound_total"),
                exponential_bound_exponent(p, H),
                tolerance,
            )
            summary.add_rate(f"gap_H{H}", fit_column(component, "gap"))
        return summary

    def self_check(self, ctx: RunContext) -> list[OracleCheck]:
        p = self.params.p
        N = min(ORACLE_LIMIT, self.params.schedule[0])
        checks = []
        for H in self.params.H:
            row = self.exact_columns(H, N)
            checks.append(
                OracleCheck(f"cov_exact[H={H}, N={N}]", row["cov_exact"], exponential_covariance_loop(H, N, p))
            )
            checks.append(
                OracleCheck(f"var_v[H={H}, N={N}]", row["var_v"], breuer_major_variance_loop(H, N, p))
            )
            for r, column in enumerate(self.pair_columns):
                checks.append(
                    OracleCheck(
                        f"{column}[H={H}, N={N}]", row[column], exponential_pair_sum_loop(H, N, r, p)
                    )
                )
            dense_cov, dense_gamma = exponential_dense_moments(
                H, DENSE_CHECK_N, p, self.params.expansion_order
            )
            checks.append(
                OracleCheck(
                    f"cov_dense[H={H}, N={DENSE_CHECK_N}]",
                    exponential_covariance(H, DENSE_CHECK_N, p),
                    dense_cov,
                )
            )
            checks.append(
                OracleCheck(
                    f"gamma_moment_dense[H={H}, N={DENSE_CHECK_N}]",
                    exponential_gamma_moment(H, DENSE_CHECK_N, p),
                    dense_gamma,
                    DENSE_GAMMA_TOLERANCE,
                )
            )
        return checks
