"""Exact sampling of stationary Gaussian increments.

The default sampler embeds the N x N Toeplitz covariance into a 2N
circulant whose spectrum comes from one FFT. When that spectrum has
eigenvalues below EMBEDDING_TOLERANCE the sampler falls back to a Cholesky
factor of the Toeplitz matrix; eigenvalues are never clipped away.
"""

import logging
from enum import Enum

import numpy as np
from scipy import linalg

from ..exceptions import SamplerError
from ..execution.pool import ReplicaPool
from .covariance import check_hurst, rho

logger = logging.getLogger(__name__)

EMBEDDING_TOLERANCE = 1e-10


class SamplerMethod(str, Enum):
    AUTO = "auto"
    CIRCULANT = "circulant"
    CHOLESKY = "cholesky"


def circulant_eigenvalues(acf: np.ndarray) -> np.ndarray:
    """Spectrum of the 2N circulant embedding of acf[0..N-1] (acf[N] appended)."""
    acf = np.asarray(acf, dtype=float)
    row = np.concatenate([acf, acf[-2:0:-1]])
    return np.fft.fft(row).real


def _circulant_paths(
    eigenvalues: np.ndarray, n: int, rng: np.random.Generator, size: int
) -> np.ndarray:
    m = eigenvalues.size
    scale = np.sqrt(np.clip(eigenvalues, 0.0, None) / m)
    pairs = (size + 1) // 2
    noise = rng.standard_normal((pairs, m)) + 1j * rng.standard_normal((pairs, m))
    spectrum = np.fft.fft(scale * noise, axis=1)[:, :n]
    # real and imaginary parts are independent paths with the target covariance
    paths = np.empty((2 * pairs, n))
    paths[0::2] = spectrum.real
    paths[1::2] = spectrum.imag
    return paths[:size]


def _cholesky_factor(acf: np.ndarray) -> np.ndarray:
    try:
        return linalg.cholesky(linalg.toeplitz(acf), lower=True)
    except linalg.LinAlgError as e:
        raise SamplerError(
            f"Neither circulant embedding nor Cholesky factorisation works for N={acf.size}"
        ) from e


def sample_stationary(
    acf: np.ndarray,
    count: int,
    seed: int,
    stream: int = 0,
    pool: ReplicaPool | None = None,
    method: SamplerMethod | str = SamplerMethod.AUTO,
) -> np.ndarray:
    """``count`` paths of a stationary Gaussian vector with autocovariance ``acf``.

    Args:
        acf: Autocovariance at lags 0..N
        count: Number of paths
        seed: Root seed
        stream: Stream identifier for this use of the seed
        pool: Replica pool; a single-worker pool by default
        method: Sampler choice; AUTO prefers the circulant embedding

    Returns:
        Array of shape (count, N)
    """
    acf = np.asarray(acf, dtype=float)
    n = acf.size - 1
    if n < 1:
        raise SamplerError("Need at least one increment")
    method = SamplerMethod(method)
    pool = pool or ReplicaPool(max_workers=1)

    factor: np.ndarray | None = None
    eigenvalues: np.ndarray | None = None
    if method != SamplerMethod.CHOLESKY:
        eigenvalues = circulant_eigenvalues(acf)
        min_eig = float(eigenvalues.min())
        if min_eig < -EMBEDDING_TOLERANCE:
            if method == SamplerMethod.CIRCULANT:
                raise SamplerError(
                    f"Circulant embedding has a negative eigenvalue {min_eig:.3e}"
                )
            logger.warning(
                f"Circulant embedding not nonnegative (min eigenvalue {min_eig:.3e}), "
                f"falling back to Cholesky"
            )
            eigenvalues = None
    if eigenvalues is None:
        factor = _cholesky_factor(acf[:n])

    def work(rng: np.random.Generator, size: int) -> np.ndarray:
        if eigenvalues is not None:
            return _circulant_paths(eigenvalues, n, rng, size)
        return rng.standard_normal((size, n)) @ factor.T

    return pool.map_rows(work, count, seed, stream).reshape(count, n)


def sample_fgn(
    H: float,
    N: int,
    count: int,
    seed: int,
    stream: int = 0,
    pool: ReplicaPool | None = None,
    method: SamplerMethod | str = SamplerMethod.AUTO,
) -> np.ndarray:
    """``count`` x ``N`` fractional Gaussian noise with unit marginal variance."""
    check_hurst(H)
    if N < 1:
        raise SamplerError(f"N must be positive, got {N}")
    return sample_stationary(rho(H, np.arange(N + 1)), count, seed, stream, pool, method)


def fbm_on_grid(increments: np.ndarray, H: float) -> np.ndarray:
    """B(k/N), k = 1..N, from unit increments by self-similarity."""
    n = increments.shape[-1]
    return np.cumsum(increments, axis=-1) * float(n) ** (-H)
