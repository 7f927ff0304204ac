"""Exact classification of free products of weighted von Neumann algebras."""

from .algmodel import (
    Algebra,
    ArakiWoods,
    Classification,
    FreeGroupFactor,
    HyperfiniteTensor,
    MatrixBlock,
    Param,
    ResidualBlock,
    Tensor,
    TypeIInfinite,
    compress,
    is_tracial,
    point_spectrum,
    rescale,
    tensor_simplify,
    validate,
)
from .classify import connes_type, free_product_classify, mirror, residual_blocks, residual_gamma
from .derive import derive_free_product
from .expr import parse
from .graphalg import classify_graph, trace_subgraph
from .numlat import RatioGroup, group_generate, group_join, group_kind, group_member

__version__ = "0.1.0"

__all__ = [
    "Algebra",
    "ArakiWoods",
    "Classification",
    "FreeGroupFactor",
    "HyperfiniteTensor",
    "MatrixBlock",
    "Param",
    "ResidualBlock",
    "Tensor",
    "TypeIInfinite",
    "compress",
    "is_tracial",
    "point_spectrum",
    "rescale",
    "tensor_simplify",
    "validate",
    "connes_type",
    "free_product_classify",
    "mirror",
    "residual_blocks",
    "residual_gamma",
    "derive_free_product",
    "parse",
    "classify_graph",
    "trace_subgraph",
    "RatioGroup",
    "group_generate",
    "group_join",
    "group_kind",
    "group_member",
]
