"""Synchronous events emitted by the experiment runner."""

import logging
from collections.abc import Callable
from enum import Enum
from typing import Any

logger = logging.getLogger(__name__)

Listener = Callable[[str, Any], None]


class EventType(Enum):
    """Types of events emitted while an experiment runs."""

    EXPERIMENT_STARTED = "experiment:start"
    EXPERIMENT_COMPLETED = "experiment:complete"

    POINT_STARTED = "point:start"
    POINT_COMPLETED = "point:complete"
    POINT_ERROR = "point:error"
    POINT_RETRY = "point:retry"

    SELFCHECK_COMPLETED = "selfcheck:complete"


class EventEmitter:
    """Dispatches runner events to listeners in registration order.

    A listener that raises is logged and skipped; the run carries on.
    """

    def __init__(self):
        self._listeners: dict[str, list[Listener]] = {}

    def on(self, event: str, handler: Listener) -> None:
        self._listeners.setdefault(event, []).append(handler)

    def off(self, event: str, handler: Listener) -> None:
        handlers = self._listeners.get(event, [])
        if handler in handlers:
            handlers.remove(handler)

    def emit(self, event: str, data: Any = None) -> None:
        logger.debug(f"{event}: {data}")
        for handler in list(self._listeners.get(event, [])):
            try:
                handler(event, data)
            except Exception as e:
                logger.error(f"Listener for {event} failed: {e}")
