"""Output management for experiment runs.

A run directory holds ``results.csv`` (one row per experiment point, fixed
column order), ``manifest.json`` (configuration echo, versions, fits and
self-check outcome) and optionally ``samples.bin`` (raw Monte-Carlo draws).
``results.csv`` carries no timestamps, so identical configurations give
byte-identical files.
"""

import csv
import json
import logging
import math
import struct
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import ot
import scipy

from .. import __version__
from ..exceptions import ConfigError

logger = logging.getLogger(__name__)

RESULTS_FILE = "results.csv"
MANIFEST_FILE = "manifest.json"
SAMPLES_FILE = "samples.bin"

_HEADER = struct.Struct("<QQ")

Row = dict[str, Any]


def format_cell(value: Any) -> str:
    """Text of one CSV cell; floats round-trip through ``repr``."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        return repr(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def _json_value(value: Any) -> Any:
    # NaN and infinities are not valid JSON
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, dict):
        return {k: _json_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_value(v) for v in value]
    return value


def software_versions() -> dict[str, str]:
    return {
        "chaoslab": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "pot": ot.__version__,
    }


@dataclass
class RunManifest:
    """Everything a run reports besides the raw rows."""

    experiment: str
    seed: int
    config: dict[str, Any]
    columns: list[str]
    rows: list[Row]
    fits: dict[str, Any] = field(default_factory=dict)
    predictions: dict[str, Any] = field(default_factory=dict)
    summary: dict[str, Any] = field(default_factory=dict)
    self_check: list[dict[str, Any]] | None = None
    failures: list[dict[str, str]] = field(default_factory=list)
    versions: dict[str, str] = field(default_factory=software_versions)

    def column(self, name: str) -> list[Any]:
        return [row.get(name) for row in self.rows]

    def to_dict(self) -> dict[str, Any]:
        return _json_value(
            {
                "experiment": self.experiment,
                "seed": self.seed,
                "versions": self.versions,
                "config": self.config,
                "columns": self.columns,
                "table": self.rows,
                "fits": self.fits,
                "predictions": self.predictions,
                "summary": self.summary,
                "self_check": self.self_check,
                "failures": self.failures,
            }
        )


class OutputManager:
    """Writes and reads the files of one run directory."""

    def __init__(self, base_dir: str | Path):
        """Initialize output manager.

        Args:
            base_dir: Run directory, created if missing
        """
        self.base_dir = Path(base_dir)
        self.base_dir.mkdir(parents=True, exist_ok=True)

    def save_results(self, columns: Sequence[str], rows: Sequence[Row]) -> Path:
        """Write ``results.csv`` with exactly ``columns`` in order."""
        path = self.base_dir / RESULTS_FILE
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=list(columns), lineterminator="\n")
            writer.writeheader()
            for row in rows:
                writer.writerow({name: format_cell(row.get(name)) for name in columns})
        logger.debug(f"Wrote {len(rows)} rows to {path}")
        return path

    def save_manifest(self, manifest: RunManifest) -> Path:
        path = self.base_dir / MANIFEST_FILE
        with open(path, "w", encoding="utf-8") as f:
            json.dump(manifest.to_dict(), f, indent=2, ensure_ascii=False)
            f.write("\n")
        return path

    def save_samples(self, samples: np.ndarray) -> Path:
        """Write an n x d matrix as little-endian float64 after an (n, d) header."""
        values = np.asarray(samples, dtype="<f8")
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2:
            raise ConfigError(f"Samples must be an n x d matrix, got shape {values.shape}")
        path = self.base_dir / SAMPLES_FILE
        with open(path, "wb") as f:
            f.write(_HEADER.pack(*values.shape))
            f.write(np.ascontiguousarray(values).tobytes(order="C"))
        logger.debug(f"Wrote {values.shape[0]} x {values.shape[1]} samples to {path}")
        return path

    def save_run(self, manifest: RunManifest, samples: np.ndarray | None = None) -> Path:
        """Write every file of a run and return the run directory."""
        self.save_results(manifest.columns, manifest.rows)
        self.save_manifest(manifest)
        if samples is not None:
            self.save_samples(samples)
        logger.info(f"Saved {manifest.experiment} run to {self.base_dir}")
        return self.base_dir


def load_manifest(run_dir: str | Path) -> dict[str, Any]:
    with open(Path(run_dir) / MANIFEST_FILE, encoding="utf-8") as f:
        return json.load(f)


def load_results(run_dir: str | Path) -> list[dict[str, str]]:
    """Rows of ``results.csv`` as strings, in file order."""
    with open(Path(run_dir) / RESULTS_FILE, encoding="utf-8", newline="") as f:
        return list(csv.DictReader(f))


def load_samples(run_dir: str | Path) -> np.ndarray:
    data = (Path(run_dir) / SAMPLES_FILE).read_bytes()
    if len(data) < _HEADER.size:
        raise ConfigError("samples.bin is shorter than its header")
    n, d = _HEADER.unpack_from(data)
    body = np.frombuffer(data, dtype="<f8", offset=_HEADER.size)
    if body.size != n * d:
        raise ConfigError(f"samples.bin holds {body.size} values, header says {n} x {d}")
    return body.reshape(n, d).astype(float)
