"""Breuer-Major statistic next to non-central Hermite variations.

X_N = N^{-1/2} sum_k He_p(L_{k,H0}) is asymptotically Gaussian while each
Y_{N,j} = N^{q_j(1-H_j)-1} sum_k He_{q_j}(L_{k,H_j}) converges to a Hermite
law; all increment families are driven by one white noise. The covariance
E X_N Y_{N,j} decays, and the pair becomes asymptotically independent.
"""

import logging
import math

import numpy as np

from ...chaos.diagnostics import contraction_diagnostics, fourth_moment_gram
from ...chaos.hermite import probabilists_table
from ...exceptions import QuadratureError
from ...fbm.correlated import CorrelatedGrid, sample_correlated_fgn
from ...fbm.covariance import CovarianceModel, check_hurst
from ...fbm.kernels import (
    breuer_major_boundary,
    breuer_major_kernel,
    breuer_major_sigma2,
    hermite_variation_kernel,
    pure_chaos_covariance,
)
from ...stein.bounds import SteinTarget, stein_bound_from_kernels
from ...tensor.gram import PSD_CHECK_LIMIT
from ..config import JointCLTParams
from ..oracles import (
    ORACLE_LIMIT,
    OracleCheck,
    breuer_major_variance_loop,
    joint_covariance_loop,
    self_contraction_loop,
)
from ..output import Row
from ..rates import joint_covariance_exponent
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


class JointCLTExperiment(Experiment):
    """Exact covariances, contractions and bounds of (X_N, Y_{N,j}) with MC gaps."""

    params_model = JointCLTParams
    params: JointCLTParams

    @property
    def columns(self) -> list[str]:
        return [
            "j", "p", "q", "H0", "H", "N",
            "cov_exact", "var_x", "var_y",
            "contraction_r1", "contraction_max", "fourth_moment_ratio",
            "sigma2_target", "bound_self", "bound_cross", "bound_total", "bound_exact",
            "mc_cov", "mc_cov_stderr",
            "gap", "gap_stderr", "baseline", "baseline_stderr",
            "error",
        ]  # fmt: skip

    def validate(self) -> list[str]:
        errors = []
        p, H0 = self.params.p, self.params.H0
        for H in (H0, *self.params.H):
            if not 0.0 < H < 1.0:
                errors.append(f"Hurst index {H} outside (0, 1)")
        if H0 >= breuer_major_boundary(p):
            errors.append(f"H0={H0} must lie below {breuer_major_boundary(p):.4f} for p={p}")
        for q, H in zip(self.params.q, self.params.H):
            if q < 1:
                errors.append(f"Order q={q} must be positive")
            elif H <= breuer_major_boundary(q):
                errors.append(f"H={H} must exceed {breuer_major_boundary(q):.4f} for q={q}")
        return errors

    def points(self) -> list[Point]:
        points = []
        for j in range(len(self.params.H)):
            for N in self.params.schedule:
                points.append(Point(len(points), {"j": j + 1, "N": N}))
        return points

    def _target(self, var_x: float) -> float:
        try:
            return breuer_major_sigma2(self.params.p, self.params.H0)[0]
        except QuadratureError as e:
            logger.info(f"Using the finite-N variance as target: {e}")
            return var_x

    def exact_columns(self, j: int, N: int) -> Row:
        """Every exact column of component ``j`` (1-based) at N."""
        p, H0 = self.params.p, self.params.H0
        q, Hj = self.params.q[j - 1], self.params.H[j - 1]
        gram = CovarianceModel((H0, Hj)).gram(N, check=2 * N <= PSD_CHECK_LIMIT)
        f = breuer_major_kernel(H0, N, p, gram, family=0)
        g = hermite_variation_kernel(Hj, N, q, gram, family=1)

        var_x = math.factorial(p) * f.norm2()
        contractions = contraction_diagnostics(f) if p >= 2 else []
        ratio = math.nan
        if p <= 2:
            ratio = fourth_moment_gram(f) / var_x**2
        sigma2 = self._target(var_x)
        report = stein_bound_from_kernels(f, [g], SteinTarget(sigma2))
        return {
            "j": j,
            "p": p,
            "q": q,
            "H0": H0,
            "H": Hj,
            "N": N,
            "cov_exact": pure_chaos_covariance(f, g),
            "var_x": var_x,
            "var_y": math.factorial(q) * g.norm2(),
            "contraction_r1": contractions[0] if contractions else math.nan,
            "contraction_max": max(contractions) if contractions else math.nan,
            "fourth_moment_ratio": ratio,
            "sigma2_target": sigma2,
            "bound_self": report.gamma_self_l2,
            "bound_cross": report.gamma_cross_l2[0],
            "bound_total": report.total,
            "bound_exact": report.exact,
        }

    def monte_carlo_columns(self, point: Point, ctx: RunContext, j: int, N: int) -> Row:
        p, H0 = self.params.p, self.params.H0
        q, Hj = self.params.q[j - 1], self.params.H[j - 1]
        grid = CorrelatedGrid(
            subdivisions=self.params.grid_subdivisions, tail_mass=self.params.tail_mass
        ).refined(ctx.refinement)
        paths = sample_correlated_fgn(
            (H0, Hj), N, self.params.replicas, ctx.seed, ctx.stream(point), ctx.pool, grid
        )
        X = probabilists_table(paths[0], p)[..., p].sum(axis=-1) / math.sqrt(N)
        Y = probabilists_table(paths[1], q)[..., q].sum(axis=-1) * float(N) ** (
            q * (1.0 - Hj) - 1.0
        )
        joint = np.column_stack([X, Y])
        self.last_sample = joint
        covariance = MonteCarloSummary.of(X * Y)
        return {
            "mc_cov": covariance.mean,
            "mc_cov_stderr": covariance.stderr,
            **dependence_columns(ctx, point, joint),
        }

    def evaluate(self, point: Point, ctx: RunContext) -> list[Row]:
        j, N = point.values["j"], point.values["N"]
        row = self.exact_columns(j, N)
        if N in self.params.mc_schedule:
            row.update(self.monte_carlo_columns(point, ctx, j, N))
        logger.info(f"joint-clt j={j} N={N}: E X_N Y_N = {row['cov_exact']:.6e}")
        return [row]

    def summarize(self, rows: list[Row]) -> Summary:
        summary = Summary()
        p, H0 = self.params.p, self.params.H0
        tolerance = self.params.slope_tolerance
        for j, (q, Hj) in enumerate(zip(self.params.q, self.params.H), start=1):
            component = rows_where(rows, j=j)
            if p == q:
                summary.add_rate(
                    f"abs_cov_{j}",
                    fit_column(component, "cov_exact", absolute=True),
                    joint_covariance_exponent(p, H0, Hj),
                    tolerance,
                )
            else:
                summary.checks[f"orthogonal_{j}"] = all(
                    row["cov_exact"] == 0.0 for row in component if not row.get("error")
                )
            summary.add_rate(f"contraction_max_{j}", fit_column(component, "contraction_max"))
            summary.add_rate(f"bound_total_{j}", fit_column(component, "bound_total"))
            summary.add_rate(f"gap_{j}", fit_column(component, "gap"))
        return summary

    def self_check(self, ctx: RunContext) -> list[OracleCheck]:
        N = min(ORACLE_LIMIT, self.params.schedule[0])
        p, H0 = self.params.p, self.params.H0
        checks = []
        for j, (q, Hj) in enumerate(zip(self.params.q, self.params.H), start=1):
            check_hurst(Hj)
            row = self.exact_columns(j, N)
            checks.append(
                OracleCheck(
                    f"cov_exact[j={j}, N={N}]",
                    row["cov_exact"],
                    joint_covariance_loop(H0, Hj, N, p, q),
                )
            )
            if j == 1:
                checks.append(
                    OracleCheck(f"var_x[N={N}]", row["var_x"], breuer_major_variance_loop(H0, N, p))
                )
                if p == 2:
                    checks.append(
                        OracleCheck(
                            f"contraction_r1^2[N={N}]",
                            row["contraction_r1"] ** 2,
                            self_contraction_loop(H0, N),
                        )
                    )
        return checks
