"""Test fixtures and utilities."""

from pathlib import Path

from .events import EventCollector, RecordedEvent

CONFIG_DIR = Path(__file__).parent / "configs"


def config_path(name: str) -> Path:
    """Path of a sample configuration file shipped with the tests."""
    return CONFIG_DIR / name


__all__ = ["EventCollector", "RecordedEvent", "CONFIG_DIR", "config_path"]
