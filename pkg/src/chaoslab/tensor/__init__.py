"""Symmetric tensor algebra in dense and Gram representations."""

from .dense import (
    DenseSymTensor,
    DenseTensor,
    contract,
    inner,
    norm,
    symmetrize,
    tensor_product,
)
from .gram import (
    GramMatrix,
    RankOneSum,
    ToeplitzGram,
    gram_contract_inner,
    gram_contraction_norm,
    rank_one_inner,
)

__all__ = [
    "DenseTensor",
    "DenseSymTensor",
    "tensor_product",
    "symmetrize",
    "contract",
    "inner",
    "norm",
    "GramMatrix",
    "ToeplitzGram",
    "RankOneSum",
    "gram_contract_inner",
    "gram_contraction_norm",
    "rank_one_inner",
]
