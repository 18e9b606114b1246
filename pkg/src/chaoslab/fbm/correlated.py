"""Correlated fractional noises driven by one white noise.

Each family H is the moving average

    B^H_t = d(H) int ((t - s)_+^{H-1/2} - (-s)_+^{H-1/2}) dW_s,

so that increments L_{k,H} = B^H_{k+1} - B^H_k are linear in the white
noise. The noise is discretised on cells: within each unit interval a
uniform grid of ``subdivisions`` cells whose last cell is refined
dyadically towards the integer endpoint, where the kernel is singular for
H < 1/2, over a near window of past units; further back, geometrically
growing cells reach a cut-off beyond which the neglected L2 mass is below
``tail_mass``. Every increment is the inner product of exact cell averages
of its kernel with the Gaussian cell increments, so all families share the
same noise and the covariance of the discrete sampler is known exactly.

The normaliser d(H) is calibrated on the discrete variance and must agree
with its closed form within ``variance_tolerance``; otherwise the grid is
too coarse and sampling fails.
"""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import fft

from ..exceptions import SamplerError
from ..execution.pool import ReplicaPool
from .covariance import check_hurst, mvn_normalizer_closed_form

logger = logging.getLogger(__name__)

# elements of one chunk's spectral work array
CHUNK_BUDGET = 2**22


@dataclass(frozen=True)
class CorrelatedGrid:
    """Discretisation settings of the moving-average sampler."""

    subdivisions: int = 64
    dyadic_levels: int = 10
    near_units: int = 16
    far_ratio: float = 1.1
    tail_mass: float = 1e-4
    variance_tolerance: float = 0.01

    def refined(self, level: int) -> "CorrelatedGrid":
        """A finer grid for retries: doubled subdivisions and extra dyadic levels."""
        if level <= 0:
            return self
        return CorrelatedGrid(
            subdivisions=self.subdivisions * 2**level,
            dyadic_levels=self.dyadic_levels + 2 * level,
            near_units=self.near_units,
            far_ratio=self.far_ratio,
            tail_mass=self.tail_mass,
            variance_tolerance=self.variance_tolerance,
        )


def unit_cells(grid: CorrelatedGrid) -> tuple[np.ndarray, np.ndarray]:
    """Left offsets and widths of the cells tiling one unit interval [0, 1)."""
    m = grid.subdivisions
    left = list(np.arange(m - 1) / m)
    width = [1.0 / m] * (m - 1)
    start, size = 1.0 - 1.0 / m, 1.0 / (2 * m)
    for _ in range(grid.dyadic_levels):
        left.append(start)
        width.append(size)
        start += size
        size /= 2.0
    left.append(start)
    width.append(1.0 - start)
    return np.asarray(left), np.asarray(width)


def _power_difference(y: np.ndarray, w: np.ndarray, beta: float) -> np.ndarray:
    """y^beta - (y - w)^beta for y >= w >= 0, accurate when w << y."""
    y = np.asarray(y, dtype=float)
    w = np.broadcast_to(np.asarray(w, dtype=float), y.shape)
    out = np.zeros(y.shape)
    positive = y > 0.0
    yp = y[positive]
    ratio = np.minimum(w[positive] / yp, 1.0)
    with np.errstate(divide="ignore"):
        out[positive] = -(yp**beta) * np.expm1(beta * np.log1p(-ratio))
    return out


def _cell_integral(t: np.ndarray, right: np.ndarray, w: np.ndarray, beta: float) -> np.ndarray:
    """int over [right - w, right) of (t - s)_+^{beta-1} ds, times beta."""
    # (t - s)_+ over the cell spans [max(t - right, 0), t - right + w]
    top = np.maximum(t - right + w, 0.0)
    bottom = np.maximum(t - right, 0.0)
    # pass the exact width when the whole cell lies in the support
    span = np.where(bottom > 0.0, np.broadcast_to(w, top.shape), top)
    return _power_difference(top, span, beta)


def increment_cell_averages(
    H: float, k: np.ndarray, right: np.ndarray, width: np.ndarray
) -> np.ndarray:
    """Cell averages of the increment kernel of L_k over cells [right - width, right).

    Without the normaliser d(H); broadcasts over k, right and width.
    """
    beta = H + 0.5
    k = np.asarray(k, dtype=float)
    upper = _cell_integral(k + 1.0, right, width, beta)
    lower = _cell_integral(k, right, width, beta)
    return (upper - lower) / (beta * width)


@dataclass(frozen=True)
class _FarCells:
    right: np.ndarray
    width: np.ndarray


def far_cutoff(H: float, grid: CorrelatedGrid, start: float) -> float:
    """Distance S beyond which the kernel's L2 mass is below the tolerance."""
    a = H - 0.5
    if a == 0.0:
        return start
    d2 = mvn_normalizer_closed_form(H) ** 2
    # int_S^inf (a s^{a-1})^2 ds = a^2 S^{2H-2} / (2 - 2H)
    scale = a * a * d2 / (2.0 - 2.0 * H)
    return max(start, (grid.tail_mass / scale) ** (1.0 / (2.0 * H - 2.0)))


class MovingAverageDesign:
    """Coefficients of N increments of each family on one shared cell grid."""

    def __init__(
        self, hursts: Sequence[float], n: int, grid: CorrelatedGrid | None = None
    ):
        """Initialize the design.

        Args:
            hursts: Hurst index of every family
            n: Number of unit increments per family
            grid: Discretisation settings

        Raises:
            SamplerError: If a family's discrete variance misses its target
        """
        if n < 1:
            raise SamplerError(f"n must be positive, got {n}")
        for H in hursts:
            check_hurst(H)
        self.hursts = tuple(float(H) for H in hursts)
        self.n = n
        self.grid = grid or CorrelatedGrid()
        self.near = max(n, self.grid.near_units)
        self.units = self.near + n
        self.cell_left, self.cell_width = unit_cells(self.grid)
        self.far = self._far_cells()
        self.normalizers = tuple(self._calibrate(H) for H in self.hursts)

    def _far_cells(self) -> _FarCells:
        # geometric cells covering (-S, -near] by distance from the origin
        start = float(self.near)
        cutoff = max(far_cutoff(H, self.grid, start) for H in self.hursts)
        edges = [start]
        while edges[-1] < cutoff:
            edges.append(edges[-1] * self.grid.far_ratio)
        edges_arr = np.asarray(edges)
        return _FarCells(right=-edges_arr[:-1], width=np.diff(edges_arr))

    @property
    def cells_per_unit(self) -> int:
        return self.cell_left.size

    @property
    def noise_size(self) -> int:
        return self.units * self.cells_per_unit + self.far.width.size

    def near_kernel(self, H: float) -> np.ndarray:
        """(cells_per_unit, units) coefficients a_c(m) for unit lag m = k - j.

        Includes the sqrt of the cell width, so they multiply standard normals.
        """
        m = np.arange(self.units)[None, :]
        right = (-m + self.cell_left[:, None] + self.cell_width[:, None]).astype(float)
        width = np.broadcast_to(self.cell_width[:, None], right.shape)
        averages = increment_cell_averages(H, 0.0, right, width)
        return averages * np.sqrt(width)

    def far_matrix(self, H: float) -> np.ndarray:
        """(n, far cells) coefficients of the far past."""
        k = np.arange(self.n)[:, None]
        right, width = self.far.right[None, :], self.far.width[None, :]
        return increment_cell_averages(H, k, right, width) * np.sqrt(width)

    def coefficient_rows(self, family: int) -> np.ndarray:
        """Full (n, noise_size) coefficient matrix of one family, normalised."""
        H = self.hursts[family]
        kernel = self.near_kernel(H)
        k = np.arange(self.n)
        # noise unit j' = j + near, lag m = k - j = k + near - j'
        rows = np.zeros((self.n, self.units, self.cells_per_unit))
        for j_shift in range(self.units):
            lag = k + self.near - j_shift
            valid = (lag >= 0) & (lag < self.units)
            rows[valid, j_shift, :] = kernel[:, lag[valid]].T
        dense = np.concatenate(
            [rows.reshape(self.n, -1), self.far_matrix(H)], axis=1
        )
        return self.normalizers[family] * dense

    def _raw_variances(self, H: float) -> np.ndarray:
        kernel = self.near_kernel(H)
        cum = np.cumsum(np.sum(kernel**2, axis=0))
        # increment k sees lags 0..k + near of the near window
        near_part = cum[np.arange(self.n) + self.near]
        far_part = np.sum(self.far_matrix(H) ** 2, axis=1)
        return near_part + far_part

    def _calibrate(self, H: float) -> float:
        variance = float(np.mean(self._raw_variances(H)))
        calibrated = 1.0 / math.sqrt(variance)
        closed = mvn_normalizer_closed_form(H)
        deviation = abs(calibrated / closed - 1.0)
        logger.debug(f"Moving-average normaliser for H={H}: {calibrated:.6f} vs {closed:.6f}")
        if deviation > self.grid.variance_tolerance:
            raise SamplerError(
                f"Grid too coarse for H={H}: discrete variance off by {deviation:.2%}"
            )
        return calibrated

    def covariance(self, a: int, b: int) -> np.ndarray:
        """Exact (n, n) covariance <L_{k,H_a}, L_{l,H_b}> of the discrete sampler."""
        return self.coefficient_rows(a) @ self.coefficient_rows(b).T

    @cached_property
    def _spectral_kernels(self) -> tuple[int, list[np.ndarray]]:
        size = fft.next_fast_len(2 * self.units - 1, real=True)
        kernels = [
            self.normalizers[i] * fft.rfft(self.near_kernel(H), n=size, axis=-1)
            for i, H in enumerate(self.hursts)
        ]
        return size, kernels

    @cached_property
    def _far_operators(self) -> list[np.ndarray]:
        return [
            (self.normalizers[i] * self.far_matrix(H)).T for i, H in enumerate(self.hursts)
        ]

    def apply(self, near_noise: np.ndarray, far_noise: np.ndarray) -> np.ndarray:
        """Increments of every family for a batch of noises.

        Args:
            near_noise: (batch, cells_per_unit, units) standard normals
            far_noise: (batch, far cells) standard normals

        Returns:
            Array of shape (families, batch, n)
        """
        size, kernels = self._spectral_kernels
        spectrum = fft.rfft(near_noise, n=size, axis=-1)
        out = np.empty((len(self.hursts), near_noise.shape[0], self.n))
        for i in range(len(self.hursts)):
            conv = fft.irfft(np.sum(spectrum * kernels[i][None], axis=1), n=size, axis=-1)
            near_part = conv[:, self.near : self.near + self.n]
            far_part = far_noise @ self._far_operators[i]
            out[i] = near_part + far_part
        return out


def sample_correlated_fgn(
    hursts: Sequence[float],
    N: int,
    count: int,
    seed: int,
    stream: int = 0,
    pool: ReplicaPool | None = None,
    grid: CorrelatedGrid | None = None,
) -> np.ndarray:
    """Increment paths of several Hurst indices driven by one white noise.

    Returns:
        Array of shape (len(hursts), count, N); family i, replica r holds
        L_{0..N-1, H_i} of that replica.
    """
    design = MovingAverageDesign(hursts, N, grid)
    pool = pool or ReplicaPool(max_workers=1)
    per_path = design.cells_per_unit * design.units
    batch = max(1, CHUNK_BUDGET // (2 * per_path))

    def work(rng: np.random.Generator, size: int) -> np.ndarray:
        parts = []
        for start in range(0, size, batch):
            b = min(batch, size - start)
            near = rng.standard_normal((b, design.cells_per_unit, design.units))
            far = rng.standard_normal((b, design.far.width.size))
            parts.append(np.moveaxis(design.apply(near, far), 1, 0))
        return np.concatenate(parts, axis=0)

    paths = pool.map_rows(work, count, seed, stream)
    logger.debug(
        f"Sampled {count} correlated paths for H={design.hursts} "
        f"({design.noise_size} noise cells each)"
    )
    return np.moveaxis(paths.reshape(count, len(design.hursts), N), 1, 0)
