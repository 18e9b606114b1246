"""A Gaussian and a Rosenblatt limit built on the same fractional Brownian motion.

For H in (3/4, 1 - 1/(2q)) the order-q Breuer-Major statistic
V_N = N^{-1/2} sum_k He_q(L_k) is asymptotically normal while the quadratic
variation U_N = N^{1-2H} sum_k (L_k^2 - 1) converges to a Rosenblatt
variable; the two limits are independent. The Rosenblatt limit has no
exact sampler, so U_M on a finer grid of the same path stands in for it.
"""

import logging
import math

import numpy as np

from ...chaos.hermite import probabilists_table
from ...distance.wasserstein import EmpiricalSample, w1_1d, w1_sliced_estimate
from ...exceptions import ParameterRegionError, QuadratureError
from ...fbm.covariance import increment_gram
from ...fbm.kernels import breuer_major_kernel, breuer_major_sigma2, rosenblatt_proxy_kernel
from ...fbm.moments import (
    breuer_major_variance,
    check_central_noncentral_region,
    derivative_pair_moment,
    derivative_pair_sums,
    rosenblatt_proxy_gap,
)
from ...fbm.sampling import sample_fgn
from ...stein.bounds import BoundReport, SteinTarget, contraction_bound, stein_bound_from_kernels
from ...tensor.gram import PSD_CHECK_LIMIT
from ..config import CentralNoncentralParams
from ..oracles import (
    ORACLE_LIMIT,
    OracleCheck,
    breuer_major_variance_loop,
    derivative_pair_loop,
    rosenblatt_proxy_gap_loop,
)
from ..output import Row
from ..rates import central_noncentral_bound_exponent, derivative_pair_exponent
from ..runner import (
    STREAMS_PER_POINT,
    Experiment,
    Point,
    RunContext,
    Summary,
    dependence_columns,
    fit_column,
)

logger = logging.getLogger(__name__)

# fine increments held in memory at once
SAMPLE_BUDGET = 2**22
PROXY_CHECK = (4, 16)
PROXY_CHECK_TOLERANCE = 1e-8
REFERENCE_COMPONENT = 1


class CentralNoncentralExperiment(Experiment):
    """Derivative-pair moments, bounds and Monte-Carlo gaps of (V_N, U_N)."""

    params_model = CentralNoncentralParams
    params: CentralNoncentralParams

    @property
    def proxy_size(self) -> int:
        return self.params.proxy_factor * max(self.params.schedule)

    @property
    def mc_proxy_size(self) -> int:
        return self.params.mc_proxy_factor * max(self.params.mc_schedule)

    @property
    def columns(self) -> list[str]:
        return [
            "q", "H", "N",
            "a1", "a2", "a3", "derivative_moment",
            "var_v", "var_u", "sigma2_target", "contraction_envelope",
            "proxy_M", "proxy_gap",
            "bound_self", "gamma_cross", "bound_total",
            "gap", "gap_stderr", "baseline", "baseline_stderr",
            "limit_gap", "limit_gap_stderr", "u_proxy_w1",
            "error",
        ]  # fmt: skip

    def validate(self) -> list[str]:
        errors = []
        try:
            check_central_noncentral_region(self.params.q, self.params.H)
        except ParameterRegionError as e:
            errors.append(str(e))
        for M, schedule in (
            (self.proxy_size, self.params.schedule),
            (self.mc_proxy_size, self.params.mc_schedule),
        ):
            for N in schedule:
                if M % N:
                    errors.append(f"Proxy size M={M} is not a multiple of N={N}")
        return errors

    def points(self) -> list[Point]:
        return [Point(i, {"N": N}) for i, N in enumerate(self.params.schedule)]

    def exact_columns(self, N: int) -> Row:
        q, H = self.params.q, self.params.H
        gram = increment_gram(H, N, check=N <= PSD_CHECK_LIMIT)
        f = breuer_major_kernel(H, N, q, gram)
        g = rosenblatt_proxy_kernel(H, N, gram)

        sums = derivative_pair_sums(H, N, q)
        moment = derivative_pair_moment(H, N, q, sums)
        var_v = breuer_major_variance(H, N, q)
        try:
            sigma2 = breuer_major_sigma2(q, H)[0]
        except QuadratureError as e:
            logger.info(f"Using the finite-N variance as target: {e}")
            sigma2 = var_v
        proxy_gap = rosenblatt_proxy_gap(H, N, self.proxy_size)
        self_part = stein_bound_from_kernels(f, [], SteinTarget(sigma2))
        # Gamma(V_N, U_N) = <DV_N, DU_N> / q
        gamma_cross = math.sqrt(moment) / q
        report = BoundReport(
            self_part.gamma_self_l2, (gamma_cross,), math.sqrt(proxy_gap), exact=False
        )
        return {
            "q": q,
            "H": H,
            "N": N,
            "a1": sums[0],
            "a2": sums[1],
            "a3": sums[2],
            "derivative_moment": moment,
            "var_v": var_v,
            "var_u": 2.0 * g.norm2(),
            "sigma2_target": sigma2,
            "contraction_envelope": contraction_bound(f, g),
            "proxy_M": self.proxy_size,
            "proxy_gap": proxy_gap,
            "bound_self": report.gamma_self_l2,
            "gamma_cross": gamma_cross,
            "bound_total": report.total,
        }

    def sample_statistics(self, point: Point, ctx: RunContext, N: int) -> np.ndarray:
        """Replicas x (V_N, U_N, U_M), all three read off one fine path."""
        q, H = self.params.q, self.params.H
        M = self.mc_proxy_size
        m = M // N
        count = self.params.replicas
        batch = max(SAMPLE_BUDGET // M, math.ceil(count / (STREAMS_PER_POINT - 2)), 1)
        parts = []
        for b, start in enumerate(range(0, count, batch)):
            size = min(batch, count - start)
            fine = sample_fgn(
                H, M, size, ctx.seed, ctx.stream(point, REFERENCE_COMPONENT + 1 + b), ctx.pool
            )
            coarse = fine.reshape(size, N, m).sum(axis=-1) * (N / M) ** H
            V = probabilists_table(coarse, q)[..., q].sum(axis=-1) / math.sqrt(N)
            U_N = float(N) ** (1.0 - 2.0 * H) * (coarse**2 - 1.0).sum(axis=-1)
            U_M = float(M) ** (1.0 - 2.0 * H) * (fine**2 - 1.0).sum(axis=-1)
            parts.append(np.column_stack([V, U_N, U_M]))
        return np.concatenate(parts, axis=0)

    def monte_carlo_columns(self, point: Point, ctx: RunContext, N: int, sigma2: float) -> Row:
        stats = self.sample_statistics(point, ctx, N)
        joint = stats[:, :2]
        self.last_sample = joint
        half = stats.shape[0] // 2
        # independent reference draws of the limit pair (Z, U_M)
        rng = np.random.default_rng(ctx.derived_seed(point, REFERENCE_COMPONENT))
        Z = rng.standard_normal(stats.shape[0] - half) * math.sqrt(sigma2)
        limit = EmpiricalSample.from_columns(Z, stats[half:, 2])
        limit_gap, limit_se = w1_sliced_estimate(
            EmpiricalSample(joint[:half]), limit, ctx.sliced, ctx.derived_seed(point)
        )
        return {
            **dependence_columns(ctx, point, joint),
            "limit_gap": limit_gap,
            "limit_gap_stderr": limit_se,
            "u_proxy_w1": w1_1d(EmpiricalSample(stats[:, 1]), EmpiricalSample(stats[:, 2])),
        }

    def evaluate(self, point: Point, ctx: RunContext) -> list[Row]:
        N = point.values["N"]
        row = self.exact_columns(N)
        if N in self.params.mc_schedule:
            row.update(self.monte_carlo_columns(point, ctx, N, row["sigma2_target"]))
        logger.info(f"central-noncentral N={N}: E<DV,DU>^2 = {row['derivative_moment']:.6e}")
        return [row]

    def summarize(self, rows: list[Row]) -> Summary:
        q, H = self.params.q, self.params.H
        tolerance = self.params.slope_tolerance
        summary = Summary()
        summary.add_rate(
            "derivative_moment",
            fit_column(rows, "derivative_moment"),
            derivative_pair_exponent(q, H),
            tolerance,
        )
        summary.add_rate(
            "bound_total",
            fit_column(rows, "bound_total"),
            central_noncentral_bound_exponent(q, H),
            tolerance,
            envelope=True,
        )
        summary.add_rate("contraction_envelope", fit_column(rows, "contraction_envelope"))
        summary.add_rate("gap", fit_column(rows, "gap"))
        summary.add_rate("limit_gap", fit_column(rows, "limit_gap"))
        return summary

    def self_check(self, ctx: RunContext) -> list[OracleCheck]:
        q, H = self.params.q, self.params.H
        N = min(ORACLE_LIMIT, self.params.schedule[0])
        checks = [
            OracleCheck(f"{name}[N={N}]", value, oracle)
            for name, value, oracle in zip(
                ("a1", "a2", "a3"), derivative_pair_sums(H, N, q), derivative_pair_loop(H, N, q)
            )
        ]
        checks.append(
            OracleCheck(f"var_v[N={N}]", breuer_major_variance(H, N, q), breuer_major_variance_loop(H, N, q))
        )
        n, M = PROXY_CHECK
        checks.append(
            OracleCheck(
                f"proxy_gap[N={n}, M={M}]",
                rosenblatt_proxy_gap(H, n, M),
                rosenblatt_proxy_gap_loop(H, n, M),
                PROXY_CHECK_TOLERANCE,
            )
        )
        return checks
