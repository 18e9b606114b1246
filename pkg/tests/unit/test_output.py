"""Tests for run directories: results.csv, manifest.json and samples.bin."""

import math

import numpy as np
import pytest

from chaoslab.exceptions import ConfigError
from chaoslab.explab.output import (
    RESULTS_FILE,
    SAMPLES_FILE,
    OutputManager,
    RunManifest,
    format_cell,
    load_manifest,
    load_results,
    load_samples,
    software_versions,
)


def make_manifest(**overrides) -> RunManifest:
    fields = {
        "experiment": "hurst",
        "seed": 3,
        "config": {"experiment": "hurst"},
        "columns": ["H", "N", "h_hat", "ok"],
        "rows": [
            {"H": 0.3, "N": 16, "h_hat": 0.31, "ok": True},
            {"H": 0.9, "N": 16, "h_hat": math.nan, "ok": False},
        ],
        "fits": {"h_error": {"slope": -0.5}},
        "versions": {"chaoslab": "test"},
    }
    fields.update(overrides)
    return RunManifest(**fields)


class TestFormatCell:
    """Tests for CSV cell text."""

    @pytest.mark.parametrize(
        ("value", "text"),
        [
            (None, ""),
            (True, "true"),
            (False, "false"),
            (math.nan, "nan"),
            (0.1, "0.1"),
            (np.float64(1e-17), "1e-17"),
            (np.int64(7), "7"),
            ("summable", "summable"),
        ],
    )
    def test_cells(self, value, text):
        assert format_cell(value) == text

    def test_floats_round_trip(self):
        value = 1.0 / 3.0
        assert float(format_cell(value)) == value


class TestOutputManager:
    """Tests for writing and reading run files."""

    def test_results_column_order(self, run_dir):
        manager = OutputManager(run_dir)
        manager.save_results(["N", "H"], [{"H": 0.3, "N": 16, "extra": 1}])
        assert (run_dir / RESULTS_FILE).read_text(encoding="utf-8") == "N,H\n16,0.3\n"

    def test_missing_cells_are_empty(self, run_dir):
        OutputManager(run_dir).save_results(["N", "fit"], [{"N": 8}])
        assert load_results(run_dir) == [{"N": "8", "fit": ""}]

    def test_manifest_has_no_nan(self, run_dir):
        """Non-finite numbers become null so the manifest stays valid JSON."""
        OutputManager(run_dir).save_run(make_manifest())
        manifest = load_manifest(run_dir)
        assert manifest["table"][1]["h_hat"] is None
        assert manifest["fits"] == {"h_error": {"slope": -0.5}}
        assert manifest["columns"] == ["H", "N", "h_hat", "ok"]
        assert not (run_dir / SAMPLES_FILE).exists()

    def test_results_written_by_save_run(self, run_dir):
        OutputManager(run_dir).save_run(make_manifest())
        rows = load_results(run_dir)
        assert rows[1] == {"H": "0.9", "N": "16", "h_hat": "nan", "ok": "false"}

    def test_samples(self, run_dir, rng):
        samples = rng.standard_normal((5, 3))
        OutputManager(run_dir).save_samples(samples)
        np.testing.assert_array_equal(load_samples(run_dir), samples)
        assert (run_dir / SAMPLES_FILE).stat().st_size == 16 + 5 * 3 * 8

    def test_vector_samples_become_a_column(self, run_dir):
        OutputManager(run_dir).save_samples(np.arange(4.0))
        assert load_samples(run_dir).shape == (4, 1)

    def test_three_dimensional_samples_rejected(self, run_dir):
        with pytest.raises(ConfigError):
            OutputManager(run_dir).save_samples(np.zeros((2, 2, 2)))

    def test_truncated_samples_file(self, run_dir):
        OutputManager(run_dir).save_samples(np.ones((4, 2)))
        path = run_dir / SAMPLES_FILE
        path.write_bytes(path.read_bytes()[:-8])
        with pytest.raises(ConfigError):
            load_samples(run_dir)
        path.write_bytes(b"\x00" * 4)
        with pytest.raises(ConfigError):
            load_samples(run_dir)

    def test_manifest_column_accessor(self):
        assert make_manifest().column("N") == [16, 16]

    def test_versions(self):
        versions = software_versions()
        assert set(versions) == {"chaoslab", "numpy", "scipy", "pot"}
