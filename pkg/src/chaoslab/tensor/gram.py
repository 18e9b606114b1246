"""Gram-matrix representation of rank-one kernel sums.

A kernel f = sum_i a_i e_i^{(x)p} is stored as its weights and atom indices
together with the Gram matrix <e_i, e_j>. Inner products of contractions
then reduce to sums of Hadamard powers of Gram blocks:

    <f (x)_r g, f' (x)_r g'> = sum_{i,j,k,l} a_i b_j a'_k b'_l
        G_ij^r G_kl^r G_ik^(p-r) G_jl^(q-r),

which is evaluated column block by column block as sum(W * (P M Q^T)) so
that no N x N matrix is ever held in memory.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from ..exceptions import (
    ContractionOrderError,
    DimensionMismatchError,
    IncompatibleGramError,
    NotPositiveSemidefiniteError,
)
from .dense import DenseSymTensor

logger = logging.getLogger(__name__)

PSD_TOLERANCE = 1e-8
PSD_HARD_TOLERANCE = 1e-4
# largest Gram whose spectrum is checked on construction
PSD_CHECK_LIMIT = 512
COLUMN_BLOCK = 256


def _check_psd(entries: np.ndarray) -> None:
    scale = max(1.0, float(np.max(np.abs(np.diag(entries)))))
    min_eig = float(np.linalg.eigvalsh(entries)[0]) / scale
    if min_eig < -PSD_HARD_TOLERANCE:
        raise NotPositiveSemidefiniteError(min_eig)
    if min_eig < -PSD_TOLERANCE:
        logger.warning(
            f"Gram matrix drifts from positive semidefinite (min eigenvalue {min_eig:.3e})"
        )


class GramMatrix:
    """Explicit symmetric matrix of atom inner products."""

    def __init__(self, entries: np.ndarray, check: bool = True):
        """Initialize the Gram matrix.

        Args:
            entries: Symmetric N x N matrix of inner products
            check: Whether to verify symmetry and positive semidefiniteness
        """
        entries = np.array(entries, dtype=float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise DimensionMismatchError(f"Gram matrix must be square, got {entries.shape}")
        if check:
            if not np.allclose(entries, entries.T, rtol=0.0, atol=1e-12):
                raise DimensionMismatchError("Gram matrix is not symmetric")
            _check_psd(entries)
        entries.setflags(write=False)
        self._entries = entries

    @property
    def size(self) -> int:
        return self._entries.shape[0]

    def entry(self, i: int, j: int) -> float:
        return float(self._entries[i, j])

    def submatrix(self, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
        return self._entries[np.ix_(rows, cols)]

    def power_matmul(
        self, rows: np.ndarray, cols: np.ndarray, power: int, x: np.ndarray
    ) -> np.ndarray:
        """Compute (G[rows, cols] ** power) @ x with an elementwise power."""
        return (self.submatrix(rows, cols) ** power) @ x

    def dense(self) -> np.ndarray:
        return self.submatrix(np.arange(self.size), np.arange(self.size))

    def cholesky_embedding(self) -> np.ndarray:
        """Coordinates of the atoms in R^N whose Gram matrix is this one.

        Row i is an explicit vector e_i with <e_i, e_j> = G_ij. A tiny ridge
        absorbs semidefinite directions.
        """
        gram = self.dense()
        ridge = 1e-13 * max(1.0, float(np.max(np.diag(gram))))
        return linalg.cholesky(gram + ridge * np.eye(self.size), lower=True)


class ToeplitzGram(GramMatrix):
    """Gram matrix of stationary atom families.

    Atoms are grouped in ``families`` of ``n`` consecutive indices; atom
    (a, k) has global index a * n + k and <e_(a,k), e_(b,l)> = c_ab(k - l).
    ``lag_values[a, b, v + n - 1]`` holds c_ab(v) for |v| < n.
    Products with contiguous blocks of one family use FFT Toeplitz products.
    """

    def __init__(self, lag_values: np.ndarray, n: int, check: bool = True):
        lag_values = np.array(lag_values, dtype=float)
        if lag_values.ndim != 3 or lag_values.shape[0] != lag_values.shape[1]:
            raise DimensionMismatchError(
                f"Lag table must have shape (F, F, 2n - 1), got {lag_values.shape}"
            )
        if lag_values.shape[2] != 2 * n - 1:
            raise DimensionMismatchError(
                f"Lag table holds {lag_values.shape[2]} lags, expected {2 * n - 1}"
            )
        if check and not np.allclose(
            lag_values, np.transpose(lag_values, (1, 0, 2))[:, :, ::-1], atol=1e-12
        ):
            raise DimensionMismatchError("Lag table violates c_ab(v) = c_ba(-v)")
        lag_values.setflags(write=False)
        self._lags = lag_values
        self._n = n
        self._families = lag_values.shape[0]
        if check and self.size <= PSD_CHECK_LIMIT:
            _check_psd(self.dense())
        elif check:
            logger.debug(f"Skipping spectral check for Toeplitz Gram of size {self.size}")

    @property
    def size(self) -> int:
        return self._families * self._n

    @property
    def n(self) -> int:
        return self._n

    def family_atoms(self, family: int) -> np.ndarray:
        return np.arange(family * self._n, (family + 1) * self._n)

    def entry(self, i: int, j: int) -> float:
        a, k = divmod(i, self._n)
        b, l = divmod(j, self._n)
        return float(self._lags[a, b, k - l + self._n - 1])

    def submatrix(self, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
        rows, cols = np.asarray(rows), np.asarray(cols)
        fa, ka = np.divmod(rows, self._n)
        fb, kb = np.divmod(cols, self._n)
        lag = ka[:, None] - kb[None, :] + self._n - 1
        return self._lags[fa[:, None], fb[None, :], lag]

    def _contiguous(self, atoms: np.ndarray) -> tuple[int, int] | None:
        # (family, first index) when atoms form one unbroken run of a family
        if atoms.size == 0 or np.any(np.diff(atoms) != 1):
            return None
        fam_first, start = divmod(int(atoms[0]), self._n)
        if (int(atoms[-1]) // self._n) != fam_first:
            return None
        return fam_first, start

    def power_matmul(
        self, rows: np.ndarray, cols: np.ndarray, power: int, x: np.ndarray
    ) -> np.ndarray:
        rows, cols = np.asarray(rows), np.asarray(cols)
        row_run, col_run = self._contiguous(rows), self._contiguous(cols)
        if row_run is None or col_run is None:
            return super().power_matmul(rows, cols, power, x)
        (a, k0), (b, l0) = row_run, col_run
        offset = self._n - 1
        first_col = self._lags[a, b, k0 + np.arange(rows.size) - l0 + offset]
        first_row = self._lags[a, b, k0 - (l0 + np.arange(cols.size)) + offset]
        return linalg.matmul_toeplitz((first_col**power, first_row**power), x)


@dataclass(frozen=True, eq=False)
class RankOneSum:
    """Kernel sum_i a_i e_i^{(x)order} over the atoms of a Gram matrix."""

    order: int
    weights: np.ndarray
    atoms: np.ndarray
    gram: GramMatrix = field(repr=False)

    def __post_init__(self) -> None:
        weights = np.asarray(self.weights, dtype=float)
        atoms = np.asarray(self.atoms, dtype=int)
        if weights.shape != atoms.shape or weights.ndim != 1:
            raise DimensionMismatchError(
                f"{weights.size} weights for {atoms.size} atoms"
            )
        if atoms.size and (atoms.min() < 0 or atoms.max() >= self.gram.size):
            raise DimensionMismatchError("Atom index outside the Gram matrix")
        if self.order < 0:
            raise ContractionOrderError(f"Negative kernel order {self.order}")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "atoms", atoms)

    @property
    def size(self) -> int:
        return self.atoms.size

    def scale(self, factor: float) -> "RankOneSum":
        return RankOneSum(self.order, factor * self.weights, self.atoms, self.gram)

    def norm2(self) -> float:
        """Squared Hilbert-Schmidt norm a^T G^(order) a."""
        return rank_one_inner(self, self)

    def densify(self, embedding: np.ndarray | None = None) -> DenseSymTensor:
        """Dense tensor over explicit atom coordinates (Cholesky by default)."""
        if embedding is None:
            embedding = self.gram.cholesky_embedding()
        return DenseSymTensor.from_vectors(embedding[self.atoms], self.weights, self.order)


def _check_compatible(*kernels: RankOneSum) -> None:
    gram = kernels[0].gram
    for kernel in kernels[1:]:
        if kernel.gram is not gram:
            raise IncompatibleGramError("Rank-one sums refer to different Gram matrices")


def rank_one_inner(f: RankOneSum, g: RankOneSum) -> float:
    """<f, g> for kernels of equal order."""
    _check_compatible(f, g)
    if f.order != g.order:
        raise DimensionMismatchError(f"Orders differ: {f.order} vs {g.order}")
    return float(f.weights @ f.gram.power_matmul(f.atoms, g.atoms, f.order, g.weights))


def gram_contract_inner(
    f: RankOneSum,
    g: RankOneSum,
    r: int,
    f2: RankOneSum | None = None,
    g2: RankOneSum | None = None,
    block: int = COLUMN_BLOCK,
) -> float:
    """<f (x)_r g, f2 (x)_r g2>, defaulting to the squared norm of f (x)_r g.

    Args:
        f: Left kernel of order p
        g: Right kernel of order q
        r: Contraction index, 0 <= r <= min(p, q)
        f2: Left kernel of the second contraction (order p), defaults to f
        g2: Right kernel of the second contraction (order q), defaults to g
        block: Number of columns processed at once

    Returns:
        The exact inner product of the two unsymmetrized contractions
    """
    f2 = f if f2 is None else f2
    g2 = g if g2 is None else g2
    _check_compatible(f, g, f2, g2)
    p, q = f.order, g.order
    if f2.order != p or g2.order != q:
        raise DimensionMismatchError("Paired kernels must share orders")
    if not 0 <= r <= min(p, q):
        raise ContractionOrderError(f"Contraction index {r} outside [0, {min(p, q)}]")

    gram = f.gram
    a, A = f.weights, f.atoms
    b, B = g.weights, g.atoms
    a2, A2 = f2.weights, f2.atoms
    b2, B2 = g2.weights, g2.atoms

    partial_sums = []
    for start in range(0, B.size, block):
        cols = slice(start, start + block)
        # columns of Q^T = G[B2, B]^(q - r)
        y = gram.submatrix(B2, B[cols]) ** (q - r)
        y = a2[:, None] * gram.power_matmul(A2, B2, r, b2[:, None] * y)
        z = gram.power_matmul(A, A2, p - r, y)
        w = a[:, None] * gram.submatrix(A, B[cols]) ** r * b[cols][None, :]
        partial_sums.append(float(np.sum(w * z)))
    return math.fsum(partial_sums)


def gram_contraction_norm(f: RankOneSum, g: RankOneSum, r: int) -> float:
    return math.sqrt(max(gram_contract_inner(f, g, r), 0.0))
