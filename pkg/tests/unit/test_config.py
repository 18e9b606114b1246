"""Tests for the experiment config format and runtime settings."""

from pathlib import Path

import pytest

from chaoslab.config import RuntimeConfig, get_runtime_config
from chaoslab.exceptions import ConfigError
from chaoslab.execution.error_handler import ErrorStrategy
from chaoslab.explab.config import (
    U64_MAX,
    ExperimentName,
    HurstParams,
    JointCLTParams,
    build_config,
    load_experiment_config,
    parse_key_values,
    parse_schedule,
)
from tests.fixtures import config_path


class TestParsing:
    """Tests for the key = value reader and schedules."""

    def test_key_values_with_comments(self):
        text = "# sample\nH = 0.3, 0.9   # two indices\n\nschedule=2^4..2^6\n"
        assert parse_key_values(text) == {"H": "0.3, 0.9", "schedule": "2^4..2^6"}

    @pytest.mark.parametrize(
        ("text", "message"),
        [("H 0.3", "expected"), ("= 3", "empty key"), ("H = 1\nH = 2", "duplicate")],
    )
    def test_malformed_lines(self, text, message):
        with pytest.raises(ConfigError, match=message):
            parse_key_values(text)

    def test_power_range(self):
        assert parse_schedule("2^3..2^6") == [8, 16, 32, 64]

    def test_comma_list_with_powers(self):
        assert parse_schedule("8, 2^5, 100") == [8, 32, 100]

    def test_reversed_range(self):
        with pytest.raises(ValueError):
            parse_schedule("2^6..2^3")


class TestParamsModels:
    """Tests for per-experiment parameter validation."""

    def test_defaults(self):
        params = HurstParams()
        assert params.H == [0.3, 0.5, 0.75, 0.9]
        assert params.schedule == [64, 128, 256, 512, 1024]
        assert params.replicas == 10000

    def test_text_values_are_parsed(self):
        params = JointCLTParams.model_validate({"q": "2, 3", "H": "0.8,0.9", "schedule": "2^3..2^6"})
        assert params.q == [2, 3]
        assert params.H == [0.8, 0.9]
        assert params.schedule == [8, 16, 32, 64]


class TestBuildConfig:
    """Tests for assembling validated run configs."""

    def test_run_keys_are_separated(self, tmp_path):
        config = build_config(
            "hurst",
            {"H": "0.3", "seed": "7", "error_strategy": "continue", "replicas": "100"},
            tmp_path,
        )
        assert config.experiment is ExperimentName.HURST
        assert config.seed == 7
        assert config.error_strategy is ErrorStrategy.CONTINUE
        assert config.params.replicas == 100

    def test_command_line_seed_wins(self, tmp_path):
        config = build_config("hurst", {"seed": "7"}, tmp_path, seed=9, workers=3)
        assert config.seed == 9
        assert config.workers == 3

    def test_echo(self, make_config):
        echo = make_config("sde", lambdas="0,1").echo()
        assert echo["experiment"] == "sde"
        assert echo["params"]["lambdas"] == [0.0, 1.0]
        assert echo["error_strategy"] == "halt"

    @pytest.mark.parametrize(
        ("experiment", "entries"),
        [
            ("hurst", {"seed": "1", "hurst": "0.3"}),
            ("hurst", {"seed": "1", "replicas": "101"}),
            ("hurst", {"seed": "1", "schedule": "16, 8"}),
            ("hurst", {}),
            ("hurst", {"seed": str(U64_MAX + 1)}),
            ("hurst", {"seed": "-1"}),
            ("joint-clt", {"seed": "1", "q": "2,3", "H": "0.9"}),
            ("counterexample", {"seed": "1", "p": "1"}),
            ("sde", {"seed": "1", "drift": "cubic"}),
            ("brownian", {"seed": "1"}),
        ],
    )
    def test_invalid_configs(self, tmp_path, experiment, entries):
        with pytest.raises(ConfigError):
            build_config(experiment, entries, tmp_path)

    def test_largest_seed_accepted(self, tmp_path):
        assert build_config("hurst", {}, tmp_path, seed=U64_MAX).seed == U64_MAX

    def test_load_from_file(self, tmp_path):
        config = load_experiment_config("hurst", config_path("hurst_small.conf"), tmp_path, seed=5)
        assert config.params.H == [0.3, 0.9]
        assert config.params.schedule == [16, 32, 64, 128]

    def test_defaults_without_file(self, tmp_path):
        config = load_experiment_config("counterexample", None, tmp_path, seed=5)
        assert config.params.p == 2

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="Cannot read"):
            load_experiment_config("hurst", tmp_path / "absent.conf", tmp_path, seed=1)

    def test_unknown_key_in_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_experiment_config("hurst", config_path("bad_key.conf"), tmp_path, seed=1)


class TestRuntimeConfig:
    """Tests for CHAOSLAB_* environment settings."""

    def test_defaults(self, monkeypatch):
        for name in ("CHAOSLAB_WORKERS", "CHAOSLAB_LOG_LEVEL", "CHAOSLAB_OUTPUT_DIR"):
            monkeypatch.delenv(name, raising=False)
        assert get_runtime_config() == RuntimeConfig()

    def test_environment_overrides(self, monkeypatch):
        monkeypatch.setenv("CHAOSLAB_WORKERS", "2")
        monkeypatch.setenv("CHAOSLAB_LOG_LEVEL", "debug")
        monkeypatch.setenv("CHAOSLAB_OUTPUT_DIR", "elsewhere")
        runtime = get_runtime_config()
        assert runtime.workers == 2
        assert runtime.log_level == "DEBUG"
        assert Path(runtime.output_dir) == Path("elsewhere")

    @pytest.mark.parametrize(
        ("name", "value"),
        [("CHAOSLAB_WORKERS", "many"), ("CHAOSLAB_WORKERS", "0"), ("CHAOSLAB_LOG_LEVEL", "loud")],
    )
    def test_bad_values(self, monkeypatch, name, value):
        monkeypatch.setenv(name, value)
        with pytest.raises(ConfigError):
            get_runtime_config()
