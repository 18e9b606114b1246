"""Logging configuration utilities for chaoslab."""

import logging
import sys

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


def configure_logging(level: str = "INFO", show_progress: bool = True) -> None:
    """Configure logging for chaoslab runs.

    Args:
        level: Logging level (DEBUG, INFO, WARNING, ERROR)
        show_progress: Whether per-point experiment progress is logged at INFO
    """
    logging.basicConfig(
        level=getattr(logging, level.upper()),
        format="%(asctime)s - %(name)s - %(message)s",
        datefmt="%H:%M:%S",
        stream=sys.stderr,
        force=True,
    )

    if not show_progress:
        logging.getLogger("chaoslab.explab.runner").setLevel(logging.WARNING)
    # POT logs every solver call at INFO
    logging.getLogger("ot").setLevel(logging.WARNING)


# Preset configurations
def use_minimal_logging() -> None:
    """Minimal logging - only warnings and errors."""
    configure_logging(level="WARNING", show_progress=False)


def use_debug_logging() -> None:
    """Debug logging - shows every numerical detail."""
    configure_logging(level="DEBUG", show_progress=True)
