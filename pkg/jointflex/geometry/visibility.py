"""Mutual visibility between vertices of different bodies."""
from dataclasses import dataclass

import numpy as np
import shapely
from shapely import STRtree

from jointflex.app_logging import get_logger
from jointflex.geometry.scene import Scene

logger = get_logger(__name__)

# DE-9IM: interiors of the polygon and the open segment intersect.
_CROSSES_INTERIOR = "T********"


@dataclass(frozen=True)
class VertexPair:
    body_a: int
    vertex_a: int
    body_b: int
    vertex_b: int


def mutually_visible_pairs(scene: Scene) -> list[VertexPair]:
    """Cross-body vertex pairs whose connecting segment avoids every other body's interior.

    Only third bodies occlude: a segment may pass through the polygons of
    its own two endpoints. Coincident vertices are skipped.
    """
    owners, indices, points = [], [], []
    for b, body in enumerate(scene.bodies):
        for v, point in enumerate(body.world_vertices):
            owners.append(b)
            indices.append(v)
            points.append(point)
    if len(scene.bodies) < 2:
        return []
    owners_arr = np.asarray(owners)
    pts = np.asarray(points)

    left, right = np.triu_indices(len(pts), k=1)
    cross_body = owners_arr[left] != owners_arr[right]
    left, right = left[cross_body], right[cross_body]
    distinct = np.hypot(*(pts[left] - pts[right]).T) > 0.0
    left, right = left[distinct], right[distinct]
    if left.size == 0:
        return []

    segments = shapely.linestrings(np.stack([pts[left], pts[right]], axis=1))
    shapes = np.array([b.world_shape for b in scene.bodies], dtype=object)
    tree = STRtree(shapes)
    seg_idx, body_idx = tree.query(segments, predicate="intersects")
    third = (body_idx != owners_arr[left][seg_idx]) & (body_idx != owners_arr[right][seg_idx])
    seg_idx, body_idx = seg_idx[third], body_idx[third]
    blocked_mask = shapely.relate_pattern(shapes[body_idx], segments[seg_idx], _CROSSES_INTERIOR)
    blocked = np.zeros(len(segments), dtype=bool)
    blocked[seg_idx[blocked_mask]] = True

    pairs = [
        VertexPair(owners[a], indices[a], owners[b], indices[b])
        for a, b, hidden in zip(left.tolist(), right.tolist(), blocked.tolist())
        if not hidden
    ]
    logger.debug(f"{len(pairs)} of {len(segments)} cross-body vertex pairs visible")
    return pairs
