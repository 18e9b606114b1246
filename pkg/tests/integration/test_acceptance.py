"""Large-N rate checks and Monte-Carlo agreement of the core library.

These runs take minutes; deselect them with ``-m "not slow"``.
"""

import math

import numpy as np
import pytest

from chaoslab.chaos.diagnostics import fourth_moment_gram
from chaoslab.chaos.expansion import ChaosExpansion
from chaoslab.chaos.hermite import probabilists_table
from chaoslab.distance.wasserstein import (
    EmpiricalSample,
    SlicedSettings,
    independence_gap,
    self_distance_baseline,
)
from chaoslab.explab.experiments.counterexample import top_chaos_samples
from chaoslab.explab.oracles import derivative_pair_loop
from chaoslab.explab.rates import derivative_pair_exponent, joint_covariance_exponent, rate_fit
from chaoslab.fbm.covariance import CovarianceModel, rho
from chaoslab.fbm.kernels import breuer_major_kernel
from chaoslab.fbm.moments import (
    derivative_pair_moment,
    derivative_pair_sums,
    hermite_variation_covariance,
)
from chaoslab.fbm.sampling import sample_fgn
from chaoslab.tensor.dense import DenseTensor, norm, symmetrize
from chaoslab.tensor.gram import gram_contract_inner

pytestmark = pytest.mark.slow

SLOPE_TOLERANCE = 0.15
STANDARD_ERRORS = 4.0


def powers_of_two(low: int, high: int) -> list[int]:
    return [2**k for k in range(low, high + 1)]


class TestIsometry:
    """E I_p(f)^2 = p! |f|^2 against a million draws."""

    @pytest.mark.parametrize("case", range(20))
    def test_variance_matches_draws(self, case):
        rng = np.random.default_rng(500 + case)
        dim = int(rng.integers(1, 4))
        order = int(rng.integers(1, 4))
        X = ChaosExpansion.pure(symmetrize(DenseTensor(rng.standard_normal((dim,) * order))))
        values = X.evaluate(rng.standard_normal((1_000_000, dim)))
        centered = values - values.mean()
        stderr = float(np.std(centered**2) / math.sqrt(values.size))
        expected = math.factorial(order) * norm(X.kernel(order)) ** 2
        assert abs(float(np.var(values)) - expected) <= STANDARD_ERRORS * stderr


class TestFourthMoment:
    """Breuer-Major statistic with p = 2, H = 0.3."""

    def test_ratio_decreases_toward_three(self):
        ratios, contractions = [], []
        for N in powers_of_two(6, 12):
            f = breuer_major_kernel(0.3, N, 2)
            second = 2.0 * f.norm2()
            ratios.append(fourth_moment_gram(f) / second**2)
            contractions.append((N, gram_contract_inner(f, f, 1)))
        assert all(r > 3.0 for r in ratios)
        assert all(later < earlier for earlier, later in zip(ratios, ratios[1:]))
        assert rate_fit(contractions).slope <= -0.4


class TestJointCovariance:
    def test_slope(self):
        """|E X_N Y_N| for p = q = 2, H0 = 0.3, H1 = 0.9 decays like N^-0.3."""
        model = CovarianceModel((0.3, 0.9))
        table = []
        for N in powers_of_two(7, 13):
            value = hermite_variation_covariance(model.gram(N, check=False), N, 2, 2, 0.9)
            table.append((N, abs(value)))
        prediction = joint_covariance_exponent(2, 0.3, 0.9)
        assert prediction.exponent == pytest.approx(-0.3)
        assert rate_fit(table).agrees_with(-0.3, SLOPE_TOLERANCE)


class TestDerivativePair:
    """E<DV_N, DU_N>^2 for q = 3, H = 0.78."""

    def test_slope(self):
        table = [(N, derivative_pair_moment(0.78, N, 3)) for N in powers_of_two(8, 13)]
        assert derivative_pair_exponent(3, 0.78).exponent == pytest.approx(6 * 0.78 - 5)
        assert rate_fit(table).agrees_with(6 * 0.78 - 5, SLOPE_TOLERANCE)

    def test_sums_match_quadruple_loop(self):
        fast = derivative_pair_sums(0.78, 48, 3)
        np.testing.assert_allclose(fast, derivative_pair_loop(0.78, 48, 3), rtol=1e-9)


class TestGapDirection:
    """Independent limits close the gap, a dependent pair keeps it open."""

    REPLICAS = 10_000
    SETTINGS = SlicedSettings(projections=64)

    def central_noncentral_pair(self, N: int, batch: int = 1000) -> np.ndarray:
        H, q = 0.78, 3
        parts = []
        for stream in range(self.REPLICAS // batch):
            paths = sample_fgn(H, N, batch, seed=41, stream=stream)
            V = probabilists_table(paths, q)[..., q].sum(axis=-1) / math.sqrt(N)
            U = float(N) ** (1.0 - 2.0 * H) * (paths**2 - 1.0).sum(axis=-1)
            parts.append(np.column_stack([V, U]))
        return np.concatenate(parts, axis=0)

    def test_gap_near_baseline_for_independent_limits(self):
        joint = EmpiricalSample(self.central_noncentral_pair(2**12))
        gap = independence_gap(joint, 1, self.SETTINGS, seed=3)
        baseline = self_distance_baseline(joint, self.SETTINGS, seed=3)
        assert abs(gap - baseline) <= 2.0 * baseline

    def test_gap_stays_open_for_dependent_pair(self):
        N = 2**10
        f = breuer_major_kernel(0.3, N, 2)
        paths = sample_fgn(0.3, N, self.REPLICAS, seed=43)
        X = probabilists_table(paths, 2)[..., 2].sum(axis=-1) / math.sqrt(N)
        Y = top_chaos_samples(f, paths)
        assert float(np.corrcoef(X**2, Y)[0, 1]) > 0.9
        joint = EmpiricalSample.from_columns(X, Y)
        gap = independence_gap(joint, 1, self.SETTINGS, seed=5)
        baseline = self_distance_baseline(joint, self.SETTINGS, seed=5)
        assert gap > 5.0 * baseline


class TestSampledCorrelation:
    """Empirical autocorrelation of the sampler against rho_H."""

    @pytest.mark.parametrize("H", [0.3, 0.5, 0.75, 0.9])
    def test_lags_within_standard_errors(self, H):
        paths = sample_fgn(H, 256, 10_000, seed=17)
        for v in range(9):
            per_path = np.mean(paths[:, : 256 - v] * paths[:, v:], axis=1)
            stderr = float(np.std(per_path) / math.sqrt(per_path.size))
            assert abs(float(per_path.mean()) - float(rho(H, v))) <= STANDARD_ERRORS * stderr
