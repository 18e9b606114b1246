"""Runtime configuration read from the environment."""

import os
from dataclasses import dataclass

from .exceptions import ConfigError
from .logging_config import LOG_LEVELS

# Try to load environment variables from .env file
try:
    from dotenv import load_dotenv

    load_dotenv()
except ImportError:
    # dotenv not installed, rely on system environment variables
    pass


@dataclass(frozen=True)
class RuntimeConfig:
    """Process-wide settings that are not part of an experiment definition."""

    log_level: str = "INFO"
    workers: int = 4
    output_dir: str = "chaoslab_outputs"


def get_runtime_config() -> RuntimeConfig:
    """Get runtime configuration from environment variables.

    Returns:
        RuntimeConfig populated from CHAOSLAB_* variables

    Raises:
        ConfigError: If a variable cannot be parsed or is out of range
    """
    try:
        workers = int(os.getenv("CHAOSLAB_WORKERS", "4"))
    except ValueError as e:
        raise ConfigError(f"Invalid numeric environment setting: {e}") from e

    if workers < 1:
        raise ConfigError(f"CHAOSLAB_WORKERS must be positive, got {workers}")

    log_level = os.getenv("CHAOSLAB_LOG_LEVEL", "INFO").upper()
    if log_level not in LOG_LEVELS:
        choices = ", ".join(LOG_LEVELS)
        raise ConfigError(f"CHAOSLAB_LOG_LEVEL must be one of {choices}, got {log_level}")

    return RuntimeConfig(
        log_level=log_level,
        workers=workers,
        output_dir=os.getenv("CHAOSLAB_OUTPUT_DIR", "chaoslab_outputs"),
    )
