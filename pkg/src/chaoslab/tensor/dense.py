"""Dense tensors over a finite-dimensional real inner-product space.

A tensor of order p over R^m is held as a numpy array of shape (m,) * p;
order 0 is a 0-d array (a scalar). Symmetric tensors additionally expose
their canonical storage: one coefficient per sorted multi-index together
with the number of index tuples in its orbit.
"""

import itertools
import logging
import math
from collections.abc import Iterator
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..exceptions import (
    AsymmetricTensorError,
    ContractionOrderError,
    DimensionMismatchError,
)

logger = logging.getLogger(__name__)

SYMMETRY_TOLERANCE = 1e-10


@dataclass(frozen=True, eq=False)
class DenseTensor:
    """Order-p tensor over R^m, not necessarily symmetric."""

    coeffs: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.coeffs, dtype=float)
        if arr.ndim > 0 and len(set(arr.shape)) != 1:
            raise DimensionMismatchError(
                f"Tensor axes must share one dimension, got shape {arr.shape}"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @property
    def order(self) -> int:
        return self.coeffs.ndim

    @property
    def dim(self) -> int:
        # scalars carry no dimension of their own
        return self.coeffs.shape[0] if self.coeffs.ndim else 0

    def scalar(self) -> float:
        """Value of an order-0 tensor."""
        if self.order != 0:
            raise ContractionOrderError(f"Order {self.order} tensor is not a scalar")
        return float(self.coeffs)

    def scale(self, factor: float) -> "DenseTensor":
        return type(self)(factor * self.coeffs)

    def __add__(self, other: "DenseTensor") -> "DenseTensor":
        _check_same_shape(self, other)
        both_symmetric = isinstance(self, DenseSymTensor) and isinstance(
            other, DenseSymTensor
        )
        cls = DenseSymTensor if both_symmetric else DenseTensor
        return cls(self.coeffs + other.coeffs)


@dataclass(frozen=True, eq=False)
class DenseSymTensor(DenseTensor):
    """Symmetric order-p tensor; construction checks permutation invariance."""

    def __post_init__(self) -> None:
        super().__post_init__()
        arr = self.coeffs
        scale = max(1.0, float(np.max(np.abs(arr)))) if arr.size else 1.0
        # adjacent transpositions generate the symmetric group
        for axis in range(arr.ndim - 1):
            swapped = np.swapaxes(arr, axis, axis + 1)
            if not np.allclose(arr, swapped, rtol=0.0, atol=SYMMETRY_TOLERANCE * scale):
                raise AsymmetricTensorError(
                    f"Coefficients are not symmetric under swapping axes "
                    f"{axis} and {axis + 1}"
                )

    @classmethod
    def scalar_tensor(cls, value: float) -> "DenseSymTensor":
        return cls(np.asarray(float(value)))

    @classmethod
    def basis(cls, dim: int, index: int) -> "DenseSymTensor":
        """The basis vector e_index of R^dim as an order-1 tensor."""
        vec = np.zeros(dim)
        vec[index] = 1.0
        return cls(vec)

    @classmethod
    def from_vectors(
        cls, vectors: np.ndarray, weights: np.ndarray | None = None, order: int = 1
    ) -> "DenseSymTensor":
        """Build sum_i a_i v_i^{(x)order} from the rows of ``vectors``."""
        vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
        weights = np.ones(len(vectors)) if weights is None else np.asarray(weights)
        if order == 0:
            return cls.scalar_tensor(float(np.sum(weights)))
        letters = "abcdefghijklmnop"[:order]
        spec = ",".join(f"z{c}" for c in letters)
        coeffs = np.einsum(f"z,{spec}->{letters}", weights, *([vectors] * order))
        return cls(coeffs)

    def canonical_items(self) -> Iterator[tuple[tuple[int, ...], float, int]]:
        """Yield (sorted multi-index, coefficient, orbit size) triples."""
        if self.order == 0:
            yield (), float(self.coeffs), 1
            return
        for index in itertools.combinations_with_replacement(range(self.dim), self.order):
            yield index, float(self.coeffs[index]), multinomial(index, self.dim)

    @classmethod
    def from_canonical(
        cls, dim: int, order: int, items: dict[tuple[int, ...], float]
    ) -> "DenseSymTensor":
        """Rebuild a tensor from coefficients on sorted multi-indices."""
        if order == 0:
            return cls.scalar_tensor(items.get((), 0.0))
        coeffs = np.zeros((dim,) * order)
        for index, value in items.items():
            for perm in set(itertools.permutations(index)):
                coeffs[perm] = value
        return cls(coeffs)


def multinomial(index: tuple[int, ...], dim: int) -> int:
    """Number of index tuples that sort to ``index``."""
    counts = np.bincount(np.asarray(index, dtype=int), minlength=dim)
    return math.factorial(len(index)) // math.prod(math.factorial(int(c)) for c in counts)


def _check_same_shape(f: DenseTensor, g: DenseTensor) -> None:
    if f.coeffs.shape != g.coeffs.shape:
        raise DimensionMismatchError(
            f"Shape mismatch: order {f.order} dim {f.dim} vs order {g.order} dim {g.dim}"
        )


def _check_same_dim(f: DenseTensor, g: DenseTensor) -> None:
    if f.order and g.order and f.dim != g.dim:
        raise DimensionMismatchError(f"Dimension mismatch: {f.dim} vs {g.dim}")


def tensor_product(f: DenseTensor, g: DenseTensor) -> DenseTensor:
    """Entry (s, t) of the result equals f(s) * g(t)."""
    _check_same_dim(f, g)
    return DenseTensor(np.multiply.outer(f.coeffs, g.coeffs))


@lru_cache(maxsize=64)
def _orbit_keys(dim: int, order: int) -> np.ndarray:
    # flat position of the sorted representative of every index tuple
    idx = np.indices((dim,) * order).reshape(order, -1)
    idx.sort(axis=0)
    keys = np.ravel_multi_index(tuple(idx), (dim,) * order)
    keys.setflags(write=False)
    return keys


def symmetrize(f: DenseTensor) -> DenseSymTensor:
    """Average of f over all permutations of its arguments.

    Each orbit of index tuples receives the mean of f over the orbit, which
    equals (1/p!) * sum over S_p of f composed with sigma.
    """
    if f.order <= 1:
        return DenseSymTensor(f.coeffs)
    dim, order = f.dim, f.order
    keys = _orbit_keys(dim, order)
    size = dim**order
    sums = np.bincount(keys, weights=f.coeffs.reshape(-1), minlength=size)
    counts = np.bincount(keys, minlength=size)
    averaged = sums[keys] / counts[keys]
    return DenseSymTensor(averaged.reshape((dim,) * order))


def contract(f: DenseTensor, g: DenseTensor, r: int) -> DenseTensor:
    """r-contraction: pair the first r arguments of f with those of g.

    The remaining p - r arguments of f come first, followed by the q - r
    remaining arguments of g. r = 0 is the tensor product and r = p = q the
    scalar <f, g>.
    """
    p, q = f.order, g.order
    if not 0 <= r <= min(p, q):
        raise ContractionOrderError(f"Contraction index {r} outside [0, {min(p, q)}]")
    _check_same_dim(f, g)
    axes = list(range(r))
    return DenseTensor(np.tensordot(f.coeffs, g.coeffs, axes=(axes, axes)))


def inner(f: DenseTensor, g: DenseTensor) -> float:
    """Hilbert-Schmidt pairing: sum over all index tuples of f * g."""
    _check_same_shape(f, g)
    return float(np.sum(f.coeffs * g.coeffs))


def norm(f: DenseTensor) -> float:
    return math.sqrt(max(inner(f, f), 0.0))
