"""Exact interpenetration and clearance checks on world polygons."""
from dataclasses import dataclass

import numpy as np
import shapely
from shapely import STRtree

from jointflex.geometry.scene import Body, Scene

# Intersections below this area are treated as touching contacts.
AREA_EPSILON = 1e-14


@dataclass(frozen=True)
class PairPenetration:
    body_a: int
    body_b: int
    depth: float


def _vertex_depth(inner: Body, outer: Body) -> float:
    points = inner.world_vertices
    inside = shapely.contains_xy(outer.world_shape, points[:, 0], points[:, 1])
    if not inside.any():
        return 0.0
    depths = shapely.distance(outer.world_shape.exterior, shapely.points(points[inside]))
    return float(np.max(depths))


def _axis_overlap(a: Body, b: Body) -> float:
    """Minimum projected overlap over both bodies' edge normals."""
    axes = np.vstack([a.world_normals, b.world_normals])
    pa = a.world_vertices @ axes.T
    pb = b.world_vertices @ axes.T
    overlap = np.minimum(pa.max(axis=0) - pb.min(axis=0), pb.max(axis=0) - pa.min(axis=0))
    return max(0.0, float(overlap.min()))


def pair_depth(a: Body, b: Body) -> float:
    """Interpenetration depth of two bodies, 0 for touching or separated ones."""
    depth = max(_vertex_depth(a, b), _vertex_depth(b, a))
    if a.polygon.is_convex and b.polygon.is_convex:
        return max(depth, _axis_overlap(a, b))
    if depth == 0.0:
        common = a.world_shape.intersection(b.world_shape)
        if common.area > AREA_EPSILON:
            depth = 2.0 * common.area / common.length
    return depth


def penetrating_pairs(scene: Scene, tolerance: float = 0.0) -> list[PairPenetration]:
    """Body pairs whose penetration depth exceeds ``tolerance``."""
    shapes = [b.world_shape for b in scene.bodies]
    tree = STRtree(shapes)
    left, right = tree.query(shapes, predicate="intersects")
    found = []
    for i, j in zip(left.tolist(), right.tolist()):
        if i >= j:
            continue
        depth = pair_depth(scene.bodies[i], scene.bodies[j])
        if depth > tolerance:
            found.append(PairPenetration(i, j, depth))
    return found


def overlap_depth(scene: Scene) -> float:
    """Largest interpenetration depth over all body pairs."""
    return max((p.depth for p in penetrating_pairs(scene)), default=0.0)


def min_clearance(scene: Scene, body_index: int) -> float:
    """Distance from one body to the nearest other body."""
    target = scene.bodies[body_index].world_shape
    others = [b.world_shape for k, b in enumerate(scene.bodies) if k != body_index]
    if not others:
        return float("inf")
    return float(np.min(shapely.distance(target, others)))
