"""Pytest configuration for chaoslab tests."""

from collections.abc import Callable
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

from chaoslab.explab.config import ExperimentConfig, build_config
from tests.fixtures import EventCollector

# property tests build Gram matrices and run quadratures, far slower than the default deadline
settings.register_profile("chaoslab", deadline=None, max_examples=25)
settings.load_profile("chaoslab")

TEST_SEED = 20240917


@pytest.fixture
def rng() -> np.random.Generator:
    """Generator with a fixed seed for test data."""
    return np.random.default_rng(TEST_SEED)


@pytest.fixture
def collector() -> EventCollector:
    return EventCollector()


@pytest.fixture
def run_dir(tmp_path: Path) -> Path:
    """Output directory of one run inside the test's temporary directory."""
    return tmp_path / "run"


@pytest.fixture
def make_config(run_dir: Path) -> Callable[..., ExperimentConfig]:
    """Factory for validated configs: ``make_config("hurst", H="0.3", schedule="2^4..2^7")``."""

    def factory(
        experiment: str,
        seed: int = TEST_SEED,
        self_check: bool = False,
        output_dir: Path | None = None,
        **entries: object,
    ) -> ExperimentConfig:
        text_entries = {key: str(value) for key, value in entries.items()}
        return build_config(
            experiment,
            text_entries,
            output_dir or run_dir,
            seed=seed,
            self_check=self_check,
            workers=2,
        )

    return factory
