"""Distance constraints: pair orientation, gradient rows, sparse assembly."""
from jointflex.constraints.pairs import ConstraintPair, PairKind, orient_pair
from jointflex.constraints.rows import (
    SparseRow,
    averaged_normal_row,
    edge_vertex_rows,
    gradient_row,
)
from jointflex.constraints.selection import select_pairs
from jointflex.constraints.system import (
    AuxiliaryRows,
    DistanceSystem,
    assemble,
    block_rows_to_csr,
)

__all__ = [
    "AuxiliaryRows",
    "ConstraintPair",
    "DistanceSystem",
    "PairKind",
    "SparseRow",
    "assemble",
    "averaged_normal_row",
    "block_rows_to_csr",
    "edge_vertex_rows",
    "gradient_row",
    "orient_pair",
    "select_pairs",
]
