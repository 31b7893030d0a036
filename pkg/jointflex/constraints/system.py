"""Assembly of the initial-distance vector and the sparse Jacobian."""
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import sparse

from jointflex.app_logging import get_logger
from jointflex.config import settings
from jointflex.constraints.pairs import ConstraintPair
from jointflex.constraints.rows import pair_terms
from jointflex.constraints.selection import select_pairs
from jointflex.geometry.scene import Scene

logger = get_logger(__name__)

COLUMN_KINDS = ("x", "y", "theta")


def block_rows_to_csr(
    n_cols: int, blocks: Sequence[tuple[np.ndarray, np.ndarray]]
) -> sparse.csr_matrix:
    """Build a CSR matrix from per-row 3-wide column blocks.

    Each block is ``(start_columns, values)`` with shapes (m,) and (m, 3); a
    start column of -1 drops that block for the row. Column order within a row
    is ascending and explicit zeros are kept as structural entries.
    """
    if not blocks or len(blocks[0][0]) == 0:
        return sparse.csr_matrix((0 if not blocks else len(blocks[0][0]), n_cols))
    starts = np.stack([np.asarray(b[0], dtype=np.int64) for b in blocks], axis=1)
    values = np.stack([np.asarray(b[1], dtype=float) for b in blocks], axis=1)
    sentinel = np.iinfo(np.int64).max
    order = np.argsort(np.where(starts < 0, sentinel, starts), axis=1, kind="stable")
    starts = np.take_along_axis(starts, order, axis=1)
    values = np.take_along_axis(values, order[:, :, None], axis=1)

    present = starts >= 0
    indptr = np.concatenate([[0], np.cumsum(3 * present.sum(axis=1))])
    indices = (starts[present][:, None] + np.arange(3)).ravel()
    data = values[present].ravel()
    return sparse.csr_matrix((data, indices, indptr), shape=(len(starts), n_cols))


@dataclass(frozen=True)
class AuxiliaryRows:
    """Extra half-plane rows ``jacobian @ dq + d0 >= 0`` over the same columns."""

    d0: np.ndarray
    jacobian: sparse.csr_matrix
    labels: tuple[str, ...] = ()

    @classmethod
    def empty(cls, n_cols: int) -> "AuxiliaryRows":
        return cls(np.zeros(0), sparse.csr_matrix((0, n_cols)), ())

    @property
    def n_rows(self) -> int:
        return len(self.d0)

    def concat(self, other: "AuxiliaryRows") -> "AuxiliaryRows":
        return AuxiliaryRows(
            np.concatenate([self.d0, other.d0]),
            sparse.vstack([self.jacobian, other.jacobian], format="csr"),
            self.labels + other.labels,
        )


@dataclass(frozen=True, eq=False)
class DistanceSystem:
    """Linearized constraint polyhedron ``{dq : J dq + d0 >= 0}``.

    The first ``len(pairs)`` rows belong to ``pairs``; any further rows come
    from :meth:`with_rows`.
    """

    pairs: tuple[ConstraintPair, ...]
    d0: np.ndarray
    jacobian: sparse.csr_matrix
    labels: tuple[str, ...] = ()
    column_kinds: tuple[str, ...] = ()
    column_bodies: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.jacobian.shape[0] != len(self.d0):
            raise ValueError("row count of jacobian and d0 differ")
        if len(self.pairs) > len(self.d0):
            raise ValueError("more pairs than rows")

    @property
    def n_rows(self) -> int:
        return len(self.d0)

    @property
    def n_dof(self) -> int:
        return self.jacobian.shape[1]

    @property
    def nnz(self) -> int:
        return int(self.jacobian.nnz)

    def residuals(self, dq: np.ndarray) -> np.ndarray:
        return self.jacobian @ np.asarray(dq, dtype=float) + self.d0

    def with_rows(self, rows: AuxiliaryRows) -> "DistanceSystem":
        if rows.n_rows == 0:
            return self
        if rows.jacobian.shape[1] != self.n_dof:
            raise ValueError(
                f"auxiliary rows have {rows.jacobian.shape[1]} columns, system has {self.n_dof}"
            )
        return DistanceSystem(
            pairs=self.pairs,
            d0=np.concatenate([self.d0, rows.d0]),
            jacobian=sparse.vstack([self.jacobian, rows.jacobian], format="csr"),
            labels=self.labels + (rows.labels or tuple("aux" for _ in range(rows.n_rows))),
            column_kinds=self.column_kinds,
            column_bodies=self.column_bodies,
        )

    def boundary_values(self) -> np.ndarray:
        """Per-row displacement at which a single-column row becomes active."""
        if self.n_dof != 1:
            raise ValueError("boundary values are defined for single-column systems")
        column = self.jacobian.toarray()[:, 0]
        with np.errstate(divide="ignore"):
            return np.where(column != 0.0, -self.d0 / column, np.nan)

    def stats(self) -> dict:
        per_row = np.diff(self.jacobian.indptr)
        return {
            "rows": self.n_rows,
            "cols": self.n_dof,
            "nnz": self.nnz,
            "max_row_nnz": int(per_row.max()) if per_row.size else 0,
        }


def scene_columns(scene: Scene) -> tuple[tuple[str, ...], tuple[int, ...]]:
    kinds = COLUMN_KINDS * scene.n_free
    bodies = tuple(i for i in scene.free_indices for _ in range(3))
    return kinds, bodies


def assemble(
    scene: Scene,
    epsilon: Optional[float] = None,
    penetration_tolerance: Optional[float] = None,
    corner_mode: Optional[str] = None,
) -> DistanceSystem:
    """Select pairs at the current poses and build ``d0`` and the Jacobian.

    Distances within the clamp band just below zero are snapped to 0; larger
    negative distances survive only when ``penetration_tolerance`` admits
    them (time stepping passes the step tolerance here).

    Raises:
        InitialPenetrationError: with the offending pair identified.
    """
    pairs = select_pairs(
        scene,
        epsilon=epsilon,
        penetration_tolerance=penetration_tolerance,
        corner_mode=corner_mode,
    )
    terms = pair_terms(scene, pairs)
    clamp = settings.PENETRATION_TOLERANCE
    d0 = np.where((terms.distance < 0.0) & (terms.distance >= -clamp), 0.0, terms.distance)

    def start(body: int) -> int:
        col = scene.column_of(body)
        return -1 if col is None else col

    edge_cols = np.array([start(p.edge_body) for p in pairs], dtype=np.int64)
    vertex_cols = np.array([start(p.vertex_body) for p in pairs], dtype=np.int64)
    jacobian = block_rows_to_csr(
        scene.n_dof,
        [(edge_cols, terms.edge_gradient), (vertex_cols, terms.vertex_gradient)],
    )
    kinds, bodies = scene_columns(scene)
    system = DistanceSystem(
        pairs=tuple(pairs),
        d0=d0,
        jacobian=jacobian,
        labels=tuple(p.label(scene.names) for p in pairs),
        column_kinds=kinds,
        column_bodies=bodies,
    )
    logger.debug(
        f"Assembled {system.n_rows}x{system.n_dof} system with {system.nnz} non-zeros",
        extra={"n_rows": system.n_rows, "n_cols": system.n_dof},
    )
    return system
