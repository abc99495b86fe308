"""Exact construction and verification of spin models built from Hadamard matrices."""

from .cyclo import Cyclotomic, gauss_sum, order_of, root_of_unity
from .matrix import Labels, PermutationSpec, SpinMatrix, entrywise_minus, mat_mul, tensor
from .scalar import EntryMonomial, Ring, Scalar, embed, monomial_inverse, potts_D

__version__ = "0.1.0"

__all__ = [
    "Cyclotomic",
    "EntryMonomial",
    "Labels",
    "PermutationSpec",
    "Ring",
    "Scalar",
    "SpinMatrix",
    "embed",
    "entrywise_minus",
    "gauss_sum",
    "mat_mul",
    "monomial_inverse",
    "order_of",
    "potts_D",
    "root_of_unity",
    "tensor",
]
