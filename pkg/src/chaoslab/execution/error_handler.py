"""Error strategies for experiment points."""

import logging
from collections.abc import Callable
from enum import Enum
from typing import TypeVar

from ..exceptions import QuadratureError, SamplerError, StepSizeError
from .events import EventEmitter, EventType

logger = logging.getLogger(__name__)

T = TypeVar("T")

# failures a refined numerical setting can cure
RETRYABLE = (QuadratureError, SamplerError, StepSizeError)


class ErrorStrategy(str, Enum):
    """Strategies for handling errors at one experiment point."""

    HALT = "halt"
    CONTINUE = "continue"
    RETRY = "retry"


class PointFailure:
    """Marker returned in place of a result when a point is skipped."""

    def __init__(self, point: str, error: Exception):
        self.point = point
        self.error = error

    def __repr__(self) -> str:
        return f"PointFailure({self.point!r}, {self.error!r})"


class ErrorHandler:
    """Applies an ErrorStrategy to the evaluation of experiment points."""

    def __init__(
        self,
        error_strategy: ErrorStrategy = ErrorStrategy.HALT,
        max_retries: int = 2,
        event_emitter: EventEmitter | None = None,
    ):
        """Initialize the ErrorHandler.

        Args:
            error_strategy: Strategy for handling errors
            max_retries: Maximum refinements for the retry strategy
            event_emitter: Optional event emitter for error events
        """
        self.error_strategy = ErrorStrategy(error_strategy)
        self.max_retries = max_retries
        self.event_emitter = event_emitter

    def _emit(self, event: EventType, data: dict[str, object]) -> None:
        if self.event_emitter:
            self.event_emitter.emit(event.value, data)

    def execute(self, point: str, work: Callable[[int], T]) -> T | PointFailure:
        """Evaluate ``work(refinement)`` under the configured strategy.

        ``refinement`` starts at 0 and grows by one on every retry; the work
        function uses it to tighten its numerical settings.

        Raises:
            Exception: Re-raises the error under HALT, or once retries are
                exhausted or the error is not retryable under RETRY
        """
        attempt = 0
        while True:
            try:
                return work(attempt)
            except Exception as error:
                logger.error(f"Error at point {point}: {error}")
                self._emit(
                    EventType.POINT_ERROR,
                    {
                        "point": point,
                        "error": str(error),
                        "attempt": attempt,
                        "strategy": self.error_strategy.value,
                    },
                )

                if self.error_strategy == ErrorStrategy.HALT:
                    raise

                if self.error_strategy == ErrorStrategy.CONTINUE:
                    logger.warning(f"Continuing after error at {point}: {error}")
                    return PointFailure(point, error)

                if isinstance(error, RETRYABLE) and attempt < self.max_retries:
                    attempt += 1
                    logger.info(
                        f"Retrying {point} with refinement {attempt}/{self.max_retries}"
                    )
                    self._emit(EventType.POINT_RETRY, {"point": point, "attempt": attempt})
                    continue
                logger.error(f"Giving up on {point}")
                raise
