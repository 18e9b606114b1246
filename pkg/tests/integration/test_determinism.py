"""Runs with the same seed write identical results."""

import pytest

from chaoslab.explab import load_experiment_config, run_experiment
from chaoslab.explab.output import RESULTS_FILE
from tests.fixtures import config_path


def results_bytes(name, config_file, out, seed, workers):
    config = load_experiment_config(name, config_path(config_file), out, seed=seed, workers=workers)
    run_experiment(config)
    return (out / RESULTS_FILE).read_bytes()


class TestDeterminism:
    """Same seed, same bytes; other seed, other draws."""

    @pytest.mark.parametrize(
        ("name", "config_file"),
        [("hurst", "hurst_small.conf"), ("counterexample", "counterexample_small.conf")],
    )
    def test_repeat_and_worker_count(self, tmp_path, name, config_file):
        first = results_bytes(name, config_file, tmp_path / "a", seed=5, workers=1)
        second = results_bytes(name, config_file, tmp_path / "b", seed=5, workers=1)
        threaded = results_bytes(name, config_file, tmp_path / "c", seed=5, workers=4)
        assert first == second == threaded

    def test_seed_changes_draws(self, tmp_path):
        first = results_bytes("hurst", "hurst_small.conf", tmp_path / "a", seed=5, workers=2)
        other = results_bytes("hurst", "hurst_small.conf", tmp_path / "b", seed=6, workers=2)
        assert first != other
