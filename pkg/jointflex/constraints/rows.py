"""Signed-distance rows and their pose gradients."""
from dataclasses import dataclass

import numpy as np

from jointflex.constraints.pairs import ConstraintPair, PairKind, averaged_normal
from jointflex.geometry.kinematics import perp
from jointflex.geometry.scene import Scene


@dataclass(frozen=True)
class RowTerms:
    """Distances with gradients w.r.t. (x, y, theta) of the edge and vertex bodies."""

    distance: np.ndarray
    edge_gradient: np.ndarray
    vertex_gradient: np.ndarray


def edge_vertex_rows(
    normals: np.ndarray,
    anchors: np.ndarray,
    edge_origins: np.ndarray,
    points: np.ndarray,
    vertex_origins: np.ndarray,
) -> RowTerms:
    """Evaluate ``d = n . (p - o)`` and its gradient for stacked edge-vertex pairs.

    ``n`` and the anchor ``o`` rotate with the edge body about
    ``edge_origins``; ``p`` rotates with the vertex body about
    ``vertex_origins``. All inputs are world-frame arrays of shape (m, 2).
    """
    normals = np.atleast_2d(normals)
    rel = np.atleast_2d(points) - np.atleast_2d(anchors)
    distance = np.einsum("ij,ij->i", normals, rel)

    lever_vertex = perp(np.atleast_2d(points) - np.atleast_2d(vertex_origins))
    lever_edge = perp(np.atleast_2d(anchors) - np.atleast_2d(edge_origins))
    dtheta_vertex = np.einsum("ij,ij->i", normals, lever_vertex)
    dtheta_edge = np.einsum("ij,ij->i", perp(normals), rel) - np.einsum(
        "ij,ij->i", normals, lever_edge
    )
    vertex_gradient = np.column_stack([normals[:, 0], normals[:, 1], dtheta_vertex])
    edge_gradient = np.column_stack([-normals[:, 0], -normals[:, 1], dtheta_edge])
    return RowTerms(distance, edge_gradient, vertex_gradient)


def pair_line(scene: Scene, pair: ConstraintPair) -> tuple[np.ndarray, np.ndarray]:
    """World normal and anchor point of the half-plane a pair constrains."""
    body = scene.bodies[pair.edge_body]
    if pair.kind is PairKind.AVERAGED_NORMAL:
        corner = pair.corner_index
        return averaged_normal(scene, pair.edge_body, corner), body.world_vertices[corner]
    return body.world_normals[pair.edge_index], body.world_vertices[pair.edge_index]


def pair_terms(scene: Scene, pairs: list[ConstraintPair]) -> RowTerms:
    if not pairs:
        empty = np.zeros((0, 3))
        return RowTerms(np.zeros(0), empty, empty.copy())
    normals, anchors, edge_origins, points, vertex_origins = [], [], [], [], []
    for pair in pairs:
        normal, anchor = pair_line(scene, pair)
        edge_pose = scene.bodies[pair.edge_body].pose
        vertex_body = scene.bodies[pair.vertex_body]
        normals.append(normal)
        anchors.append(anchor)
        edge_origins.append((edge_pose.x, edge_pose.y))
        points.append(vertex_body.world_vertices[pair.vertex_index])
        vertex_origins.append((vertex_body.pose.x, vertex_body.pose.y))
    return edge_vertex_rows(
        np.asarray(normals),
        np.asarray(anchors),
        np.asarray(edge_origins, dtype=float),
        np.asarray(points),
        np.asarray(vertex_origins, dtype=float),
    )


@dataclass(frozen=True)
class SparseRow:
    distance: float
    columns: tuple[int, ...]
    values: tuple[float, ...]


def gradient_row(scene: Scene, pair: ConstraintPair) -> SparseRow:
    """Distance and non-zero gradient entries of one pair; fixed-body columns dropped.

    Columns come out in ascending order with three entries per free body.
    """
    terms = pair_terms(scene, [pair])
    blocks = []
    for body, grad in (
        (pair.edge_body, terms.edge_gradient[0]),
        (pair.vertex_body, terms.vertex_gradient[0]),
    ):
        col = scene.column_of(body)
        if col is not None:
            blocks.append((col, grad))
    blocks.sort(key=lambda item: item[0])
    columns = tuple(c + k for c, _ in blocks for k in range(3))
    values = tuple(float(v) for _, grad in blocks for v in grad)
    return SparseRow(float(terms.distance[0]), columns, values)


def averaged_normal_row(scene: Scene, pair: ConstraintPair) -> SparseRow:
    """Half-plane row through the corner with the bisecting normal.

    Raises:
        ValueError: the pair is not an averaged-normal pair.
        DegenerateCornerError: the corner's edge normals cancel.
    """
    if pair.kind is not PairKind.AVERAGED_NORMAL:
        raise ValueError("averaged_normal_row needs an averaged-normal pair")
    return gradient_row(scene, pair)
