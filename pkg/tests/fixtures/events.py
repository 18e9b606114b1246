"""Recording of runner events for assertions."""

from collections import Counter
from dataclasses import dataclass
from typing import Any

from chaoslab.execution.events import EventEmitter, EventType


@dataclass(frozen=True)
class RecordedEvent:
    name: str
    data: Any


class EventCollector:
    """Listener that keeps every event it receives, in arrival order."""

    def __init__(self):
        self.events: list[RecordedEvent] = []
        self.counts: Counter[str] = Counter()

    def collect(self, name: str, data: Any) -> None:
        self.events.append(RecordedEvent(name, data))
        self.counts[name] += 1

    def subscribe(self, emitter: EventEmitter) -> EventEmitter:
        """Listen to every runner event on ``emitter``."""
        for event in EventType:
            emitter.on(event.value, self.collect)
        return emitter

    def of_type(self, name: str) -> list[RecordedEvent]:
        return [e for e in self.events if e.name == name]

    def seen(self, name: str) -> bool:
        return self.counts[name] > 0

    def sequence(self) -> list[str]:
        return [e.name for e in self.events]

    def point_labels(self, name: str = EventType.POINT_STARTED.value) -> list[str]:
        """Point labels carried by events of type ``name``."""
        return [e.data["point"] for e in self.of_type(name)]
