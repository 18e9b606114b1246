"""End-to-end runs of every experiment on small schedules."""

import math

import pytest

from chaoslab.exceptions import ConfigError, ParameterRegionError
from chaoslab.explab import (
    load_experiment_config,
    load_manifest,
    load_results,
    load_samples,
    run_central_noncentral,
    run_counterexample,
    run_experiment,
    run_hurst_estimators,
    run_infinite_chaos,
    run_joint_clt,
    run_sde_dependence,
)
from tests.fixtures import config_path


def finite(rows, column):
    return [row[column] for row in rows if math.isfinite(row.get(column, math.nan))]


class TestHurst:
    """Quadratic-variation estimators on both sides of H = 3/4."""

    def test_small_run(self, run_dir):
        config = load_experiment_config(
            "hurst", config_path("hurst_small.conf"), run_dir, seed=7, self_check=True
        )
        manifest = run_hurst_estimators(config)
        assert len(manifest.rows) == 8
        for row in manifest.rows:
            assert row["mean_S"] == pytest.approx(row["expected_S"], rel=0.25)
            assert row["regime"] == ("central" if row["H"] == 0.3 else "non-central")
        assert {"variance_H0.3", "abs_bias_H0.9"} <= set(manifest.fits)
        assert all(check["passed"] for check in manifest.self_check)

        written = load_results(run_dir)
        assert len(written) == 8
        assert list(written[0]) == manifest.columns

    def test_samples_file(self, make_config, run_dir):
        config = make_config("hurst", H="0.3,0.5", schedule="2^3..2^4", replicas=100, write_samples="true")
        run_experiment(config)
        samples = load_samples(run_dir)
        assert samples.shape == (100, 2)

    def test_wrong_runner(self, make_config):
        with pytest.raises(ConfigError):
            run_sde_dependence(make_config("hurst"))


class TestCounterexample:
    """Vanishing remainder with a dependent limit pair."""

    def test_small_run(self, run_dir):
        config = load_experiment_config("counterexample", config_path("counterexample_small.conf"), run_dir)
        manifest = run_counterexample(config)
        assert manifest.seed == 1234
        remainders = [row["r_second_moment"] for row in manifest.rows]
        assert remainders == sorted(remainders, reverse=True)
        assert all(row["r_exact"] for row in manifest.rows)
        correlations = finite(manifest.rows, "mc_corr")
        assert len(correlations) == 2
        assert min(correlations) > 0.7
        assert all(gap >= 0.0 for gap in finite(manifest.rows, "gap"))
        assert manifest.summary["r_second_moment_decays"] is True

    def test_region_error(self, run_dir):
        config = load_experiment_config("counterexample", config_path("region.conf"), run_dir, seed=1)
        with pytest.raises(ParameterRegionError, match="central regime"):
            run_experiment(config)
        assert not run_dir.exists()


class TestSDE:
    """Malliavin-derivative integral against its envelope."""

    def test_small_run(self, make_config):
        config = make_config(
            "sde",
            self_check=True,
            drift="tanh",
            lambdas="-1,0,0.5,1",
            steps=16,
            strong_tolerance=0.2,
            replicas=200,
            projections=8,
        )
        manifest = run_experiment(config)
        rows = manifest.rows
        assert [row["lambda"] for row in rows] == [-1.0, 0.0, 0.5, 1.0]
        assert all(row["steps"] == 32 for row in rows)
        assert rows[1]["integral_mean"] == pytest.approx(1.0, rel=1e-12)
        assert all(row["envelope_ratio"] <= 1.0 + 1e-12 for row in rows if row["lambda"] >= 0.0)
        assert manifest.summary == {
            "integral_monotone_in_lambda": True,
            "envelope_holds": True,
            "drift_free_integral_is_t": True,
        }

    def test_step_size_failures_recorded(self, make_config, run_dir):
        config = make_config(
            "sde", lambdas="0.5,1", steps=4, strong_tolerance=1e-6, replicas=100, error_strategy="continue"
        )
        manifest = run_experiment(config)
        assert len(manifest.failures) == 2
        written = load_results(run_dir)
        assert all(row["error"].startswith("StepSizeError") for row in written)
        assert load_manifest(run_dir)["failures"][0]["point"] == "lambda=0.5"


class TestJointCLT:
    """Breuer-Major statistic next to a Hermite variation."""

    def test_small_run(self, make_config):
        config = make_config(
            "joint-clt",
            H0=0.3,
            H=0.9,
            schedule="2^3..2^6",
            mc_schedule="8",
            replicas=200,
            projections=8,
            error_strategy="retry",
        )
        manifest = run_experiment(config)
        assert not manifest.failures
        rows = manifest.rows
        assert len(rows) == 4
        assert abs(rows[-1]["cov_exact"]) < abs(rows[0]["cov_exact"])
        assert all(row["bound_total"] >= row["bound_self"] for row in rows)
        assert len(finite(rows, "gap")) == 1
        assert "abs_cov_1" in manifest.predictions

    def test_orthogonal_orders(self, make_config):
        config = make_config(
            "joint-clt", q=3, H=0.9, schedule="2^3..2^6", mc_schedule="4", replicas=100
        )
        manifest = run_experiment(config)
        assert all(row["cov_exact"] == 0.0 for row in manifest.rows)
        assert manifest.summary["orthogonal_1"] is True


class TestInfiniteChaos:
    """Second-chaos statistic paired with an exponential functional."""

    def test_small_run(self, make_config):
        config = make_config(
            "infinite-chaos",
            self_check=True,
            H=0.3,
            schedule="2^3..2^6",
            mc_schedule="8",
            replicas=200,
            projections=8,
        )
        manifest = run_experiment(config)
        rows = manifest.rows
        covariances = [row["cov_exact"] for row in rows]
        assert covariances == sorted(covariances, reverse=True)
        assert manifest.summary["cov_H0.3"] is True
        assert all(math.isfinite(row["envelope_ratio"]) for row in rows)
        assert all(check["passed"] for check in manifest.self_check)
        assert len(finite(rows, "mc_cov")) == 1


@pytest.mark.slow
class TestCentralNoncentral:
    """Gaussian and Rosenblatt limits built on one path."""

    def test_small_run(self, make_config):
        config = make_config(
            "central-noncentral",
            q=3,
            H=0.78,
            schedule="2^3..2^6",
            mc_schedule="8,16",
            proxy_factor=4,
            mc_proxy_factor=4,
            replicas=200,
            projections=8,
        )
        manifest = run_experiment(config)
        rows = manifest.rows
        assert len(rows) == 4
        assert all(row["proxy_M"] == 256 for row in rows)
        assert all(row["derivative_moment"] > 0.0 for row in rows)
        assert len(finite(rows, "limit_gap")) == 2
        assert all(w1 >= 0.0 for w1 in finite(rows, "u_proxy_w1"))
        assert "derivative_moment" in manifest.fits


class TestNamedRunners:
    """Each named entry point only accepts its own experiment."""

    @pytest.mark.parametrize(
        "runner",
        [run_joint_clt, run_infinite_chaos, run_central_noncentral, run_counterexample, run_sde_dependence],
    )
    def test_rejects_other_experiments(self, runner, make_config, run_dir):
        with pytest.raises(ConfigError, match="not "):
            runner(make_config("hurst"))
        assert not run_dir.exists()
