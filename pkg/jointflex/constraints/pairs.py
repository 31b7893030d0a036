"""Constraint pairs and the corner orientation rule."""
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from jointflex.app_logging import get_logger
from jointflex.config import settings
from jointflex.errors import DegenerateCornerError
from jointflex.geometry.polygon import CornerKind
from jointflex.geometry.proximity import ProximityCandidate
from jointflex.geometry.scene import Scene

logger = get_logger(__name__)

# Averaged normals shorter than this come from (nearly) antiparallel edges.
MIN_AVERAGED_NORM = 1e-6


class PairKind(str, Enum):
    PLAIN = "plain"
    AVERAGED_NORMAL = "averaged_normal"


@dataclass(frozen=True)
class ConstraintPair:
    """Edge body/edge and vertex body/vertex of one distance constraint.

    For averaged-normal pairs ``averaged_edges`` holds the two edges meeting at
    the anchoring corner, which is ``averaged_edges[1]`` on the edge body.
    """

    edge_body: int
    edge_index: int
    vertex_body: int
    vertex_index: int
    kind: PairKind = PairKind.PLAIN
    averaged_edges: Optional[tuple[int, int]] = None

    def __post_init__(self) -> None:
        if self.edge_body == self.vertex_body:
            raise ValueError("a constraint pair needs two distinct bodies")
        if (self.kind is PairKind.AVERAGED_NORMAL) != (self.averaged_edges is not None):
            raise ValueError("averaged_edges must be set exactly for averaged pairs")

    @property
    def key(self) -> tuple:
        return (self.edge_body, self.edge_index, self.vertex_body, self.vertex_index, self.kind)

    @property
    def sort_key(self) -> tuple:
        low, high = sorted((self.edge_body, self.vertex_body))
        return (low, high, self.edge_body, self.edge_index, self.vertex_index, self.kind.value)

    @property
    def corner_index(self) -> Optional[int]:
        return None if self.averaged_edges is None else self.averaged_edges[1]

    def label(self, names: tuple[str, ...]) -> str:
        tag = "avg" if self.kind is PairKind.AVERAGED_NORMAL else "edge"
        index = self.corner_index if self.corner_index is not None else self.edge_index
        return (
            f"{names[self.edge_body]}.{tag}{index}"
            f"|{names[self.vertex_body]}.v{self.vertex_index}"
        )


def _swap_to_concave_body(
    scene: Scene, candidate: ProximityCandidate, corner: int, tol: float
) -> Optional[ConstraintPair]:
    """Let the concave vertex's body supply an edge against the convex corner."""
    concave_body = scene.bodies[candidate.vertex_body]
    corner_point = scene.bodies[candidate.edge_body].world_vertices[corner]
    n = concave_body.polygon.n_vertices
    v = candidate.vertex_index
    best: Optional[tuple[float, int]] = None
    for edge in ((v - 1) % n, v):
        rel = corner_point - concave_body.world_vertices[edge]
        d = float(concave_body.world_normals[edge] @ rel)
        if d < -tol or d > scene.epsilon:
            continue
        if best is None or d < best[0]:
            best = (d, edge)
    if best is None:
        return None
    return ConstraintPair(
        edge_body=candidate.vertex_body,
        edge_index=best[1],
        vertex_body=candidate.edge_body,
        vertex_index=corner,
    )


def averaged_normal(scene: Scene, body_index: int, corner: int) -> np.ndarray:
    """Unit bisector of the outward normals of the two edges meeting at a corner.

    Raises:
        DegenerateCornerError: the two normals cancel.
    """
    body = scene.bodies[body_index]
    n = body.polygon.n_vertices
    total = body.world_normals[(corner - 1) % n] + body.world_normals[corner]
    norm = float(np.hypot(*total))
    if norm < MIN_AVERAGED_NORM:
        raise DegenerateCornerError(
            f"corner {corner} of body {scene.names[body_index]!r} has antiparallel edge normals"
        )
    return total / norm


def _averaged_pair(
    scene: Scene, anchor: tuple[int, int], opposing: tuple[int, int], tol: float
) -> Optional[ConstraintPair]:
    body_index, corner = anchor
    body = scene.bodies[body_index]
    n = body.polygon.n_vertices
    rel = scene.bodies[opposing[0]].world_vertices[opposing[1]] - body.world_vertices[corner]
    prev_edge = (corner - 1) % n
    for edge in (prev_edge, corner):
        if float(body.world_normals[edge] @ rel) < -tol:
            return None
    if float(averaged_normal(scene, body_index, corner) @ rel) < -tol:
        return None
    return ConstraintPair(
        edge_body=body_index,
        edge_index=prev_edge,
        vertex_body=opposing[0],
        vertex_index=opposing[1],
        kind=PairKind.AVERAGED_NORMAL,
        averaged_edges=(prev_edge, corner),
    )


def orient_pair(
    scene: Scene,
    candidate: ProximityCandidate,
    corner_mode: Optional[str] = None,
    penetration_tolerance: Optional[float] = None,
) -> ConstraintPair:
    """Assign edge/vertex roles and the constraint kind for a proximity candidate.

    A corner interaction exists when the vertex projects beyond an endpoint of
    the edge. Then a concave vertex facing a convex endpoint swaps roles so the
    concave body supplies the edge, and two convex corners become one
    averaged-normal half-plane anchored on the lower-index body when the
    opposing vertex lies outside both of that corner's edges. Everything else
    stays a plain pair with the candidate's roles.
    """
    mode = corner_mode or settings.CORNER_MODE
    tol = settings.PENETRATION_TOLERANCE if penetration_tolerance is None else penetration_tolerance
    plain = ConstraintPair(
        edge_body=candidate.edge_body,
        edge_index=candidate.edge_index,
        vertex_body=candidate.vertex_body,
        vertex_index=candidate.vertex_index,
    )
    if not candidate.outside_span:
        return plain

    edge_body = scene.bodies[candidate.edge_body]
    vertex_body = scene.bodies[candidate.vertex_body]
    corner = candidate.edge_index
    if candidate.projection > candidate.edge_length:
        corner = (corner + 1) % edge_body.polygon.n_vertices
    corner_kind = edge_body.polygon.corner_kinds[corner]
    vertex_kind = vertex_body.polygon.corner_kinds[candidate.vertex_index]

    if vertex_kind is CornerKind.CONCAVE and corner_kind is CornerKind.CONVEX:
        return _swap_to_concave_body(scene, candidate, corner, tol) or plain

    if (
        mode == "averaged"
        and vertex_kind is CornerKind.CONVEX
        and corner_kind is CornerKind.CONVEX
    ):
        corners = sorted(
            [
                (candidate.edge_body, corner),
                (candidate.vertex_body, candidate.vertex_index),
            ]
        )
        for anchor, opposing in (corners, corners[::-1]):
            pair = _averaged_pair(scene, anchor, opposing, tol)
            if pair is not None:
                return pair
        logger.debug(f"No averaged half-plane for {plain.label(scene.names)}; keeping plain")

    return plain
