"""Edge-vertex proximity search between bodies."""
from dataclasses import dataclass
from typing import Optional

import numpy as np
import shapely

from jointflex.app_logging import get_logger
from jointflex.config import settings
from jointflex.errors import InitialPenetrationError
from jointflex.geometry.scene import Body, Scene

logger = get_logger(__name__)


@dataclass(frozen=True)
class ProximityCandidate:
    """A vertex of one body close to the (extended) line of another's edge."""

    edge_body: int
    edge_index: int
    vertex_body: int
    vertex_index: int
    distance: float
    projection: float
    edge_length: float

    @property
    def outside_span(self) -> bool:
        return self.projection < 0.0 or self.projection > self.edge_length


def _boxes_within(a: Body, b: Body, margin: float) -> bool:
    ax0, ay0, ax1, ay1 = a.bbox
    bx0, by0, bx1, by1 = b.bbox
    return not (
        ax0 - margin > bx1 or bx0 - margin > ax1 or ay0 - margin > by1 or by0 - margin > ay1
    )


def _one_way(
    scene: Scene, edge_i: int, vertex_i: int, epsilon: float, tol: float
) -> list[ProximityCandidate]:
    edge_body, vertex_body = scene.bodies[edge_i], scene.bodies[vertex_i]
    corners = edge_body.world_vertices
    normals = edge_body.world_normals
    lengths = edge_body.polygon.lengths
    directions = np.roll(corners, -1, axis=0) - corners
    directions = directions * edge_body.polygon.inv_lengths[:, None]
    points = vertex_body.world_vertices

    rel = points[None, :, :] - corners[:, None, :]
    dist = np.einsum("evk,ek->ev", rel, normals)
    proj = np.einsum("evk,ek->ev", rel, directions)
    in_span = (proj >= -epsilon) & (proj <= lengths[:, None] + epsilon)

    deep = in_span & (dist < -tol)
    if deep.any():
        suspects = np.unique(np.nonzero(deep)[1])
        inside = shapely.contains_xy(
            edge_body.world_shape, points[suspects, 0], points[suspects, 1]
        )
        if inside.any():
            boundary = edge_body.world_shape.exterior
            pts = shapely.points(points[suspects[inside]])
            depths = shapely.distance(boundary, pts)
            worst = int(np.argmax(depths))
            if depths[worst] > tol:
                v = int(suspects[inside][worst])
                e = int(np.argmax(np.where(deep[:, v], dist[:, v], -np.inf)))
                raise InitialPenetrationError(
                    edge_i,
                    e,
                    vertex_i,
                    v,
                    float(depths[worst]),
                    names=(scene.names[edge_i], scene.names[vertex_i]),
                )

    keep = in_span & (dist >= -tol) & (dist <= epsilon)
    return [
        ProximityCandidate(
            edge_body=edge_i,
            edge_index=int(e),
            vertex_body=vertex_i,
            vertex_index=int(v),
            distance=float(dist[e, v]),
            projection=float(proj[e, v]),
            edge_length=float(lengths[e]),
        )
        for e, v in zip(*np.nonzero(keep))
    ]


def find_candidates(
    scene: Scene,
    epsilon: Optional[float] = None,
    penetration_tolerance: Optional[float] = None,
) -> list[ProximityCandidate]:
    """Gate every edge-vertex combination across body pairs.

    A candidate's signed distance lies in ``[-tol, epsilon]`` and its vertex
    projects onto the edge span extended by ``epsilon`` on both ends. Pairs of
    fixed bodies are skipped.

    Raises:
        InitialPenetrationError: a vertex sits inside another body deeper
            than ``penetration_tolerance``.
    """
    eps = scene.epsilon if epsilon is None else epsilon
    tol = settings.PENETRATION_TOLERANCE if penetration_tolerance is None else penetration_tolerance

    candidates: list[ProximityCandidate] = []
    n = len(scene.bodies)
    for i in range(n):
        for j in range(i + 1, n):
            a, b = scene.bodies[i], scene.bodies[j]
            if a.fixed and b.fixed:
                continue
            if not _boxes_within(a, b, eps):
                continue
            candidates.extend(_one_way(scene, i, j, eps, tol))
            candidates.extend(_one_way(scene, j, i, eps, tol))
    logger.debug(f"Found {len(candidates)} proximity candidates")
    return candidates
