"""Tests for the chaoslab command line."""

import argparse

import pytest

from chaoslab.explab.config import U64_MAX
from chaoslab.explab.experiments.hurst import HurstExperiment
from chaoslab.explab.oracles import OracleCheck
from chaoslab.explab.output import MANIFEST_FILE, RESULTS_FILE, load_manifest
from chaoslab.main import (
    EXIT_CONFIG,
    EXIT_FAILURE,
    EXIT_OK,
    EXIT_REGION,
    EXIT_SELF_CHECK,
    main,
    parse_seed,
)
from tests.fixtures import config_path


def run_cli(experiment, config, out, *extra):
    args = [experiment, "--out", str(out), "--seed", "3", "--quiet", *extra]
    if config is not None:
        args[1:1] = ["--config", str(config)]
    return main(args)


class TestParseSeed:
    """Tests for the seed argument."""

    @pytest.mark.parametrize(("text", "value"), [("0", 0), ("42", 42), ("0x10", 16), (str(U64_MAX), U64_MAX)])
    def test_valid(self, text, value):
        assert parse_seed(text) == value

    @pytest.mark.parametrize("text", ["-1", str(U64_MAX + 1), "seven"])
    def test_invalid(self, text):
        with pytest.raises(argparse.ArgumentTypeError):
            parse_seed(text)


class TestExitCodes:
    """One exit code per outcome."""

    def test_success(self, run_dir):
        assert run_cli("hurst", config_path("hurst_small.conf"), run_dir, "--self-check") == EXIT_OK
        assert (run_dir / RESULTS_FILE).exists()
        manifest = load_manifest(run_dir)
        assert manifest["seed"] == 3
        assert manifest["self_check"]

    def test_summary_table(self, run_dir, capsys):
        args = ["hurst", "--config", str(config_path("hurst_small.conf")), "--out", str(run_dir), "--seed", "3"]
        assert main(args) == EXIT_OK
        output = capsys.readouterr().out
        assert "hurst rate fits" in output
        assert "variance_H0.3" in output

    def test_failed_points(self, tmp_path, run_dir):
        config = tmp_path / "sde.conf"
        config.write_text("lambdas = 0.5, 1\nsteps = 4\nstrong_tolerance = 1e-6\nreplicas = 100\n", encoding="utf-8")
        code = run_cli("sde", config, run_dir, "--error-strategy", "continue")
        assert code == EXIT_FAILURE
        assert len(load_manifest(run_dir)["failures"]) == 2

    def test_halting_error(self, tmp_path, run_dir):
        config = tmp_path / "sde.conf"
        config.write_text("lambdas = 1\nsteps = 4\nstrong_tolerance = 1e-6\nreplicas = 20\n", encoding="utf-8")
        assert run_cli("sde", config, run_dir) == EXIT_FAILURE
        assert not (run_dir / MANIFEST_FILE).exists()

    def test_config_error(self, run_dir):
        assert run_cli("hurst", config_path("bad_key.conf"), run_dir) == EXIT_CONFIG

    def test_missing_config_file(self, tmp_path, run_dir):
        assert run_cli("hurst", tmp_path / "absent.conf", run_dir) == EXIT_CONFIG

    def test_bad_environment(self, monkeypatch, run_dir):
        monkeypatch.setenv("CHAOSLAB_WORKERS", "none")
        assert run_cli("hurst", config_path("hurst_small.conf"), run_dir) == EXIT_CONFIG
        assert not run_dir.exists()

    def test_region_error(self, run_dir):
        assert run_cli("counterexample", config_path("region.conf"), run_dir) == EXIT_REGION
        assert not run_dir.exists()

    def test_self_check_failure(self, monkeypatch, run_dir):
        monkeypatch.setattr(
            HurstExperiment, "self_check", lambda self, ctx: [OracleCheck("expected_S", 1.0, 2.0)]
        )
        code = run_cli("hurst", config_path("hurst_small.conf"), run_dir, "--self-check")
        assert code == EXIT_SELF_CHECK
        assert not run_dir.exists()

    def test_unknown_experiment(self, run_dir):
        with pytest.raises(SystemExit) as excinfo:
            main(["brownian", "--out", str(run_dir), "--seed", "1"])
        assert excinfo.value.code == 2
