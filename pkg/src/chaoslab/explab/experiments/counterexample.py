"""Asymptotic normality without asymptotic independence.

X_N = I_p(f_N) is a Breuer-Major statistic and Y_N = I_{2p}(f_N (x)~ f_N)
is the top chaos of X_N^2. Writing X_N^2 - E X_N^2 = Y_N + R_N, the
remainder R_N vanishes in L2, so (X_N, Y_N) tends to (Z, Z^2 - sigma^2):
X_N is asymptotically normal yet never asymptotically independent of Y_N.
"""

import logging
import math

import numpy as np

from ...chaos.hermite import probabilists_table
from ...fbm.covariance import increment_gram
from ...fbm.kernels import breuer_major_boundary, breuer_major_kernel
from ...fbm.sampling import sample_fgn
from ...tensor.gram import PSD_CHECK_LIMIT, RankOneSum, gram_contract_inner
from ..config import CounterexampleParams
from ..oracles import (
    ORACLE_LIMIT,
    OracleCheck,
    breuer_major_variance_loop,
    counterexample_dense_moments,
    self_contraction_loop,
)
from ..output import Row
from ..runner import (
    Experiment,
    MonteCarloSummary,
    Point,
    RunContext,
    Summary,
    dependence_columns,
    fit_column,
)

logger = logging.getLogger(__name__)

CORRELATION_FLOOR = 0.9
GAP_RATIO_FLOOR = 5.0
DENSE_CHECK_N = 4
DENSE_CHECK_MAX_ORDER = 3


def remainder_weight(p: int, r: int) -> float:
    """Coefficient of |f (x)_r f|^2 in E R_N^2 (exact for p = 2, a majorant above)."""
    return (math.factorial(r) * math.comb(p, r) ** 2) ** 2 * math.factorial(2 * p - 2 * r)


def top_chaos_weight(p: int, r: int) -> float:
    """Coefficient of |f (x)_r f|^2 in E Y_N^2."""
    return math.factorial(p) ** 4 / (math.factorial(r) * math.factorial(p - r)) ** 2


def top_chaos_samples(f: RankOneSum, increments: np.ndarray) -> np.ndarray:
    """Draws of I_{2p}(f (x)~ f) for a uniform-weight kernel over one family.

    The Wick square of sum_k He_p(L_k) expands as
    sum_r (-1)^r r! C(p, r)^2 u_r^T (rho^r) u_r with u_r = He_{p-r}(L).
    """
    p = f.order
    weight = f.weights[0]
    table = probabilists_table(increments, p)
    total = np.zeros(increments.shape[0])
    for r in range(p + 1):
        u = table[..., p - r]
        quadratic = np.sum(u.T * f.gram.power_matmul(f.atoms, f.atoms, r, u.T), axis=0)
        total += (-1) ** r * math.factorial(r) * math.comb(p, r) ** 2 * quadratic
    return weight**2 * total


class CounterexampleExperiment(Experiment):
    """Vanishing remainder next to a dependence gap that does not close."""

    params_model = CounterexampleParams
    params: CounterexampleParams

    @property
    def contraction_columns(self) -> list[str]:
        return [f"contraction_r{r}" for r in range(1, self.params.p)]

    @property
    def columns(self) -> list[str]:
        return [
            "p", "H", "N",
            "var_x", *self.contraction_columns,
            "r_second_moment", "r_exact", "y_second_moment", "r_share",
            "mc_corr", "mc_corr_stderr", "mc_r2", "mc_r2_stderr",
            "gap", "gap_stderr", "baseline", "baseline_stderr", "gap_ratio",
            "error",
        ]  # fmt: skip

    def validate(self) -> list[str]:
        p, H = self.params.p, self.params.H
        boundary = breuer_major_boundary(p)
        if not 0.0 < H < boundary:
            return [f"H={H} outside the central regime (0, {boundary:.4f}) for p={p}"]
        return []

    def points(self) -> list[Point]:
        return [Point(i, {"N": N}) for i, N in enumerate(self.params.schedule)]

    def kernel(self, N: int) -> RankOneSum:
        H = self.params.H
        return breuer_major_kernel(H, N, self.params.p, increment_gram(H, N, check=N <= PSD_CHECK_LIMIT))

    def exact_columns(self, N: int, f: RankOneSum) -> Row:
        p = self.params.p
        norm2 = f.norm2()
        contractions = [max(gram_contract_inner(f, f, r), 0.0) for r in range(1, p)]
        r_moment = math.fsum(remainder_weight(p, r) * c for r, c in enumerate(contractions, 1))
        y_moment = 2.0 * math.factorial(p) ** 2 * norm2**2 + math.fsum(
            top_chaos_weight(p, r) * c for r, c in enumerate(contractions, 1)
        )
        row: Row = {"p": p, "H": self.params.H, "N": N, "var_x": math.factorial(p) * norm2}
        row.update(zip(self.contraction_columns, contractions))
        row.update(
            {
                "r_second_moment": r_moment,
                "r_exact": p == 2,
                "y_second_moment": y_moment,
                "r_share": r_moment / (r_moment + y_moment),
            }
        )
        return row

    def monte_carlo_columns(self, point: Point, ctx: RunContext, f: RankOneSum, var_x: float) -> Row:
        p, N = self.params.p, f.size
        paths = sample_fgn(self.params.H, N, self.params.replicas, ctx.seed, ctx.stream(point), ctx.pool)
        X = probabilists_table(paths, p)[..., p].sum(axis=-1) / math.sqrt(N)
        Y = top_chaos_samples(f, paths)
        n = X.size
        corr = float(np.corrcoef(X**2, Y)[0, 1])
        remainder = MonteCarloSummary.of((X**2 - var_x - Y) ** 2)
        joint = np.column_stack([X, Y])
        self.last_sample = joint
        dependence = dependence_columns(ctx, point, joint)
        baseline = dependence["baseline"]
        return {
            "mc_corr": corr,
            "mc_corr_stderr": (1.0 - corr**2) / math.sqrt(n - 1),
            "mc_r2": remainder.mean,
            "mc_r2_stderr": remainder.stderr,
            **dependence,
            "gap_ratio": dependence["gap"] / baseline if baseline > 0.0 else math.inf,
        }

    def evaluate(self, point: Point, ctx: RunContext) -> list[Row]:
        N = point.values["N"]
        f = self.kernel(N)
        row = self.exact_columns(N, f)
        if N in self.params.mc_schedule:
            row.update(self.monte_carlo_columns(point, ctx, f, row["var_x"]))
        logger.info(f"counterexample N={N}: E R^2 = {row['r_second_moment']:.6e}")
        return [row]

    def summarize(self, rows: list[Row]) -> Summary:
        summary = Summary()
        remainder = fit_column(rows, "r_second_moment")
        summary.add_rate("r_second_moment", remainder)
        summary.checks["r_second_moment_decays"] = remainder.slope < 0.0 if remainder else None

        correlations = [row["mc_corr"] for row in rows if math.isfinite(row.get("mc_corr", math.nan))]
        summary.checks["corr_floor"] = (
            min(correlations) > CORRELATION_FLOOR if correlations else None
        )
        ratios = [row["gap_ratio"] for row in rows if math.isfinite(row.get("gap_ratio", math.nan))]
        summary.checks["gap_above_baseline"] = min(ratios) > GAP_RATIO_FLOOR if ratios else None

        gap = fit_column(rows, "gap")
        summary.add_rate("gap", gap)
        summary.checks["gap_persistent"] = (
            gap.slope > -self.params.slope_tolerance if gap else None
        )
        return summary

    def self_check(self, ctx: RunContext) -> list[OracleCheck]:
        p, H = self.params.p, self.params.H
        N = min(ORACLE_LIMIT, self.params.schedule[0])
        row = self.exact_columns(N, self.kernel(N))
        checks = [OracleCheck(f"var_x[N={N}]", row["var_x"], breuer_major_variance_loop(H, N, p))]
        if p == 2:
            checks.append(
                OracleCheck(f"contraction_r1[N={N}]", row["contraction_r1"], self_contraction_loop(H, N))
            )
        if p <= DENSE_CHECK_MAX_ORDER:
            small = self.exact_columns(DENSE_CHECK_N, self.kernel(DENSE_CHECK_N))
            r_dense, y_dense = counterexample_dense_moments(H, DENSE_CHECK_N, p)
            checks.append(
                OracleCheck(f"y_second_moment[N={DENSE_CHECK_N}]", small["y_second_moment"], y_dense)
            )
            if p == 2:
                checks.append(
                    OracleCheck(f"r_second_moment[N={DENSE_CHECK_N}]", small["r_second_moment"], r_dense)
                )
        return checks
