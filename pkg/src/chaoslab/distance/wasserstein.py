"""Empirical Wasserstein-1 estimators for joint versus product laws.

One-dimensional distances are exact order-statistic transports computed
by POT. In higher dimension the distance is replaced by its sliced
version, the mean of 1-D distances over random unit directions, which
bounds the true W1 from below.

Empirical W1 has a positive floor that shrinks with the sample size, so a
gap is only meaningful next to the self-distance baseline of the same law
at the same sample size. ``independence_gap`` and
``self_distance_baseline`` therefore both compare two halves of one
sample.
"""

import logging
from dataclasses import dataclass

import numpy as np
import ot

from ..exceptions import SampleMismatchError

logger = logging.getLogger(__name__)

# spawn keys separating the random draws of one seed
PROJECTION_STREAM = 0
PERMUTATION_STREAM = 1
RESAMPLE_STREAM = 2


@dataclass(frozen=True, eq=False)
class EmpiricalSample:
    """n draws of a d-dimensional random vector, one per row."""

    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2:
            raise SampleMismatchError(f"Sample must be an n x d matrix, got shape {values.shape}")
        if values.shape[0] < 2:
            raise SampleMismatchError(f"Need at least two draws, got {values.shape[0]}")
        if not np.all(np.isfinite(values)):
            raise SampleMismatchError("Sample contains non-finite entries")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_array(cls, values: np.ndarray | list[float]) -> "EmpiricalSample":
        return cls(np.asarray(values, dtype=float))

    @classmethod
    def from_columns(cls, *columns: np.ndarray) -> "EmpiricalSample":
        """Joint sample whose coordinates are the given equal-length columns."""
        return cls(np.column_stack([np.asarray(c, dtype=float).ravel() for c in columns]))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]

    def column(self, j: int) -> "EmpiricalSample":
        return EmpiricalSample(self.values[:, j])

    def block(self, start: int, stop: int | None = None) -> "EmpiricalSample":
        return EmpiricalSample(self.values[:, start:stop])

    def split(self) -> tuple["EmpiricalSample", "EmpiricalSample"]:
        """First and second half of the draws; n must be even."""
        if self.n % 2:
            raise SampleMismatchError(f"Cannot halve an odd sample of size {self.n}")
        half = self.n // 2
        return EmpiricalSample(self.values[:half]), EmpiricalSample(self.values[half:])

    def scaled(self, factor: float) -> "EmpiricalSample":
        return EmpiricalSample(factor * self.values)

    def rotated(self, matrix: np.ndarray) -> "EmpiricalSample":
        """Apply x -> Q x to every draw."""
        return EmpiricalSample(self.values @ np.asarray(matrix, dtype=float).T)


@dataclass(frozen=True)
class SlicedSettings:
    """Projection settings of the sliced estimator.

    ``axis_mode`` projects on the coordinate axes instead of random
    directions; then ``projections`` is ignored.
    """

    projections: int = 128
    axis_mode: bool = False


def _rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream,)))


def _resample(sample: EmpiricalSample, size: int, seed: int) -> EmpiricalSample:
    rows = _rng(seed, RESAMPLE_STREAM).choice(sample.n, size=size, replace=False)
    return EmpiricalSample(sample.values[np.sort(rows)])


def w1_1d(
    a: EmpiricalSample, b: EmpiricalSample, resample: bool = False, seed: int = 0
) -> float:
    """Exact empirical W1 of two one-dimensional samples.

    Args:
        a: First sample, d = 1
        b: Second sample, d = 1
        resample: Subsample the larger sample down to the smaller size
        seed: Seed of the subsampling

    Raises:
        SampleMismatchError: On d != 1, or differing sizes without ``resample``
    """
    if a.d != 1 or b.d != 1:
        raise SampleMismatchError(f"w1_1d needs one-dimensional samples, got d={a.d}, {b.d}")
    if a.n != b.n:
        if not resample:
            raise SampleMismatchError(f"Sample sizes differ: {a.n} vs {b.n}")
        size = min(a.n, b.n)
        a = _resample(a, size, seed) if a.n > size else a
        b = _resample(b, size, seed) if b.n > size else b
    return float(ot.wasserstein_1d(a.values[:, 0], b.values[:, 0], p=1.0))


def projection_directions(d: int, settings: SlicedSettings, seed: int) -> np.ndarray:
    """(projections, d) unit directions, uniform on the sphere or the axes."""
    if settings.axis_mode:
        return np.eye(d)
    if settings.projections < 1:
        raise SampleMismatchError(f"Need at least one projection, got {settings.projections}")
    directions = _rng(seed, PROJECTION_STREAM).standard_normal((settings.projections, d))
    return directions / np.linalg.norm(directions, axis=1, keepdims=True)


def sliced_distances(
    a: EmpiricalSample,
    b: EmpiricalSample,
    settings: SlicedSettings | None = None,
    seed: int = 0,
) -> np.ndarray:
    """w1_1d of both samples projected on every shared direction."""
    settings = settings or SlicedSettings()
    if a.d != b.d:
        raise SampleMismatchError(f"Dimensions differ: {a.d} vs {b.d}")
    if a.n != b.n:
        raise SampleMismatchError(f"Sample sizes differ: {a.n} vs {b.n}")
    directions = projection_directions(a.d, settings, seed)
    pa = a.values @ directions.T
    pb = b.values @ directions.T
    return np.array(
        [float(ot.wasserstein_1d(pa[:, i], pb[:, i], p=1.0)) for i in range(directions.shape[0])]
    )


def w1_sliced(
    a: EmpiricalSample,
    b: EmpiricalSample,
    settings: SlicedSettings | None = None,
    seed: int = 0,
) -> float:
    """Mean of w1_1d over projections of both samples on shared directions."""
    return float(np.mean(sliced_distances(a, b, settings, seed)))


def w1_sliced_estimate(
    a: EmpiricalSample,
    b: EmpiricalSample,
    settings: SlicedSettings | None = None,
    seed: int = 0,
) -> tuple[float, float]:
    """(w1_sliced, standard error over the projections).

    The error reflects the projection noise only, not the sampling noise of
    the draws; with a single projection it is zero.
    """
    distances = sliced_distances(a, b, settings, seed)
    if distances.size < 2:
        return float(distances.mean()), 0.0
    return float(distances.mean()), float(distances.std(ddof=1) / np.sqrt(distances.size))


def product_sample(joint: EmpiricalSample, split: int, seed: int) -> EmpiricalSample:
    """Joint sample with the block of columns ``split:`` permuted across draws."""
    if not 0 < split < joint.d:
        raise SampleMismatchError(f"Split index {split} must lie in (0, {joint.d})")
    permutation = _rng(seed, PERMUTATION_STREAM).permutation(joint.n)
    values = np.concatenate([joint.values[:, :split], joint.values[permutation, split:]], axis=1)
    return EmpiricalSample(values)


def independence_gap(
    joint: EmpiricalSample,
    split: int,
    settings: SlicedSettings | None = None,
    seed: int = 0,
) -> float:
    """Sliced W1 between a joint law and the product of its marginals.

    The first half of the draws stands for the joint law; the second half,
    with its ``split:`` block independently permuted, stands for the
    product law. Both halves are independent, so under independence the
    gap has the law of ``self_distance_baseline``.

    Args:
        joint: Draws of (X, Y), X the first ``split`` columns
        split: Index of the first column of Y
        settings: Projection settings
        seed: Seed of the permutation and the projections

    Raises:
        SampleMismatchError: If the number of draws is odd
    """
    return independence_gap_estimate(joint, split, settings, seed)[0]


def independence_gap_estimate(
    joint: EmpiricalSample,
    split: int,
    settings: SlicedSettings | None = None,
    seed: int = 0,
) -> tuple[float, float]:
    """``independence_gap`` with its projection standard error."""
    first, second = joint.split()
    product = product_sample(second, split, seed)
    gap, stderr = w1_sliced_estimate(first, product, settings, seed)
    logger.debug(f"Independence gap {gap:.4e} over n={joint.n}, permutation seed {seed}")
    return gap, stderr


def self_distance_baseline(
    sample: EmpiricalSample, settings: SlicedSettings | None = None, seed: int = 0
) -> float:
    """Sliced W1 between the two halves of one sample."""
    return self_distance_estimate(sample, settings, seed)[0]


def self_distance_estimate(
    sample: EmpiricalSample, settings: SlicedSettings | None = None, seed: int = 0
) -> tuple[float, float]:
    first, second = sample.split()
    return w1_sliced_estimate(first, second, settings, seed)
