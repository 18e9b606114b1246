"""Execution support: replica pools, error strategies and events."""

from .error_handler import ErrorHandler, ErrorStrategy, PointFailure
from .events import EventEmitter, EventType
from .pool import ReplicaPool, chunk_rng, compensated_mean

__all__ = [
    "ReplicaPool",
    "chunk_rng",
    "compensated_mean",
    "ErrorHandler",
    "ErrorStrategy",
    "PointFailure",
    "EventEmitter",
    "EventType",
]
