"""Parallel Monte-Carlo replication over independent random streams."""

import logging
import math
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import TypeVar

import numpy as np

logger = logging.getLogger(__name__)

T = TypeVar("T")

DEFAULT_CHUNK = 1024


def chunk_rng(seed: int, stream: int, chunk: int) -> np.random.Generator:
    """Generator owned by one (seed, stream, chunk) triple."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream, chunk)))


class ReplicaPool:
    """Run replica chunks on a thread pool with deterministic results.

    Each chunk draws from its own generator keyed by (seed, stream, chunk),
    and results are returned in chunk order, so the output does not depend
    on the number of workers or the completion order.
    """

    def __init__(self, max_workers: int = 4, chunk_size: int = DEFAULT_CHUNK):
        """Initialize the pool.

        Args:
            max_workers: Maximum number of concurrent workers
            chunk_size: Replicas handled by one task
        """
        if max_workers < 1 or chunk_size < 1:
            raise ValueError("max_workers and chunk_size must be positive")
        self.max_workers = max_workers
        self.chunk_size = chunk_size

    def chunk_sizes(self, count: int) -> list[int]:
        full, rest = divmod(count, self.chunk_size)
        return [self.chunk_size] * full + ([rest] if rest else [])

    def map_chunks(
        self,
        work: Callable[[np.random.Generator, int], T],
        count: int,
        seed: int,
        stream: int = 0,
    ) -> list[T]:
        """Call ``work(rng, size)`` for every chunk of ``count`` replicas.

        Args:
            work: Function producing the results of ``size`` replicas
            count: Total number of replicas
            seed: Root seed of the run
            stream: Stream identifier separating independent uses of one seed

        Returns:
            Chunk results in chunk order
        """
        sizes = self.chunk_sizes(count)
        if not sizes:
            return []
        if len(sizes) == 1 or self.max_workers == 1:
            return [work(chunk_rng(seed, stream, i), size) for i, size in enumerate(sizes)]

        results: dict[int, T] = {}
        with ThreadPoolExecutor(max_workers=self.max_workers) as executor:
            futures = {
                executor.submit(work, chunk_rng(seed, stream, i), size): i
                for i, size in enumerate(sizes)
            }
            for future in as_completed(futures):
                results[futures[future]] = future.result()
        logger.debug(f"Completed {len(sizes)} chunks of stream {stream}")
        return [results[i] for i in range(len(sizes))]

    def map_rows(
        self,
        work: Callable[[np.random.Generator, int], np.ndarray],
        count: int,
        seed: int,
        stream: int = 0,
    ) -> np.ndarray:
        """Like ``map_chunks`` for array results, stacked along the first axis."""
        parts = self.map_chunks(work, count, seed, stream)
        if not parts:
            return np.empty((0,))
        return np.concatenate(parts, axis=0)


def compensated_mean(values: np.ndarray) -> float:
    """Mean with compensated summation."""
    values = np.asarray(values, dtype=float).ravel()
    return math.fsum(values.tolist()) / values.size if values.size else math.nan
