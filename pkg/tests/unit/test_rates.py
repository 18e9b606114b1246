"""Unit tests for rate fits and predicted exponents."""

import pytest

from chaoslab.exceptions import RateFitError
from chaoslab.explab.config import InfiniteChaosParams
from chaoslab.explab.experiments.infinite_chaos import InfiniteChaosExperiment
from chaoslab.explab.rates import (
    RateFit,
    breuer_major_distance_exponent,
    central_noncentral_bound_exponent,
    derivative_pair_exponent,
    exponential_bound_exponent,
    exponential_covariance_exponent,
    exponential_gamma_exponent,
    fit_or_none,
    joint_covariance_exponent,
    rate_fit,
    rosenblatt_distance_exponent,
)
from chaoslab.fbm.moments import exponential_gamma_moment

SCHEDULE = [2**k for k in range(4, 9)]


class TestRateFit:
    """Tests for log-log least squares."""

    def test_exact_power_law(self):
        fit = rate_fit([(N, 3.0 * N**-0.5) for N in SCHEDULE])
        assert fit.slope == pytest.approx(-0.5)
        assert fit.intercept == pytest.approx(1.584962500721156)
        assert fit.stderr == pytest.approx(0.0, abs=1e-12)
        assert fit.points == 5

    def test_constant_values(self):
        fit = rate_fit([(N, 2.0) for N in SCHEDULE])
        assert fit.slope == 0.0
        assert fit.intercept == pytest.approx(1.0)

    def test_too_few_points(self):
        with pytest.raises(RateFitError, match="at least 4"):
            rate_fit([(8, 1.0), (16, 0.5), (32, 0.25)])

    def test_non_positive_values(self):
        with pytest.raises(RateFitError):
            rate_fit([(N, 0.0 if N == 32 else 1.0) for N in SCHEDULE])

    def test_fit_or_none(self):
        assert fit_or_none([(N, 0.0) for N in SCHEDULE]) is None
        assert fit_or_none([(N, 1.0 / N) for N in SCHEDULE]).slope == pytest.approx(-1.0)

    def test_agreement_and_envelope(self):
        fit = RateFit(slope=-0.45, stderr=0.01, intercept=0.0, points=5)
        assert fit.agrees_with(-0.5)
        assert not fit.agrees_with(-0.8)
        assert fit.below(-0.5)
        assert not fit.below(-0.7, tolerance=0.1)
        assert fit.to_dict()["points"] == 5


class TestPredictions:
    """Branch selection of the predicted exponents."""

    @pytest.mark.parametrize(
        ("H0", "exponent", "branch"),
        [(0.3, -0.3, "summable"), (0.6, -0.3, "log"), (0.7, -0.1, "long-memory")],
    )
    def test_joint_covariance(self, H0, exponent, branch):
        prediction = joint_covariance_exponent(2, H0, 0.9)
        assert prediction.exponent == pytest.approx(exponent)
        assert prediction.branch == branch

    def test_exponential_covariance(self):
        assert exponential_covariance_exponent().exponent == -0.5

    @pytest.mark.parametrize(
        ("H", "exponent", "envelope"), [(0.3, -1.0, False), (0.5, -1.0, False), (0.7, -0.6, True)]
    )
    def test_exponential_gamma(self, H, exponent, envelope):
        prediction = exponential_gamma_exponent(H)
        assert prediction.exponent == pytest.approx(exponent)
        assert prediction.envelope is envelope

    @pytest.mark.parametrize(
        ("H", "exponent", "envelope"), [(0.3, -0.5, False), (0.6, -0.4, True), (0.8, 0.1, True)]
    )
    def test_exponential_bound(self, H, exponent, envelope):
        prediction = exponential_bound_exponent(2, H)
        assert prediction.exponent == pytest.approx(exponent)
        assert prediction.envelope is envelope

    def test_breuer_major_distance(self):
        assert breuer_major_distance_exponent(2, 0.4).exponent == pytest.approx(-0.6)
        assert breuer_major_distance_exponent(2, 0.6).exponent == pytest.approx(-0.3)
        assert breuer_major_distance_exponent(2, 0.6).branch == "near-boundary"

    def test_rosenblatt_distance(self):
        assert rosenblatt_distance_exponent(0.8).exponent == pytest.approx(-0.1)

    @pytest.mark.parametrize(("q", "exponent"), [(3, -0.32), (4, -0.44)])
    def test_derivative_pair(self, q, exponent):
        assert derivative_pair_exponent(q, 0.78).exponent == pytest.approx(exponent)

    @pytest.mark.parametrize(("H", "exponent"), [(0.78, -0.06), (0.82, -0.04)])
    def test_central_noncentral_bound_cubic(self, H, exponent):
        assert central_noncentral_bound_exponent(3, H).exponent == pytest.approx(exponent)

    def test_central_noncentral_bound_quartic(self):
        prediction = central_noncentral_bound_exponent(4, 0.8)
        assert prediction.branch == "combined"
        assert prediction.exponent == pytest.approx(-0.1)


class TestExponentialGammaSlopes:
    """Measured decay of the exact pairing moment over 2^7..2^13."""

    SCHEDULE = [2**k for k in range(7, 14)]

    def fit(self, H, p):
        return rate_fit([(N, exponential_gamma_moment(H, N, p)) for N in self.SCHEDULE])

    @pytest.mark.parametrize("p", [2, 3])
    def test_short_memory_slope_is_attained(self, p):
        fit = self.fit(0.3, p)
        assert fit.agrees_with(-1.0, 0.15)

    @pytest.mark.parametrize("p", [2, 3])
    def test_long_memory_exponent_is_an_upper_bound(self, p):
        """At H = 0.7 the slope sits near -1, well below 2H - 2 = -0.6."""
        prediction = exponential_gamma_exponent(0.7)
        fit = self.fit(0.7, p)
        assert prediction.envelope
        assert fit.below(prediction.exponent, 0.15)
        assert not fit.agrees_with(prediction.exponent, 0.15)
        assert fit.slope == pytest.approx(-1.0, abs=0.15)

    def test_summary_reports_slope_next_to_envelope(self):
        experiment = InfiniteChaosExperiment(InfiniteChaosParams(H="0.3,0.7"))
        rows = [
            {"H": H, "N": N, "gamma_moment": exponential_gamma_moment(H, N, 2)}
            for H in (0.3, 0.7)
            for N in self.SCHEDULE
        ]
        summary = experiment.summarize(rows)
        short, long = summary.predictions["gamma_moment_H0.3"], summary.predictions["gamma_moment_H0.7"]
        assert short["envelope"] is False and short["exponent"] == -1.0
        assert long["envelope"] is True and long["exponent"] == pytest.approx(-0.6)
        assert long["fitted_slope"] == summary.fits["gamma_moment_H0.7"]["slope"]
        assert long["fitted_slope"] < long["exponent"] - 0.15
        assert summary.checks["gamma_moment_H0.3"] is True
        assert summary.checks["gamma_moment_H0.7"] is True
        assert summary.predictions["bound_total_H0.3"]["envelope"] is False
        assert summary.predictions["bound_total_H0.7"]["envelope"] is True
        assert summary.checks["bound_total_H0.7"] is None
