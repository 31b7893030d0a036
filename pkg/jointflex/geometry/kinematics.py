"""World-frame vertices, edge normals and edge-vertex signed distances."""
import numpy as np

from jointflex.geometry.scene import Body


def world_vertex(body: Body, vertex_index: int) -> np.ndarray:
    """Return ``(x + r cos(theta + alpha), y + r sin(theta + alpha))``."""
    i = body.polygon.check_index(vertex_index)
    return body.world_vertices[i].copy()


def edge_normal(body: Body, edge_index: int) -> np.ndarray:
    """Outward unit normal of an edge at the body's pose."""
    i = body.polygon.check_index(edge_index)
    return body.world_normals[i].copy()


def edge_origin(body: Body, edge_index: int) -> np.ndarray:
    """World position of the edge's first endpoint."""
    return world_vertex(body, edge_index)


def signed_distance(
    edge_body: Body, edge_index: int, vertex_body: Body, vertex_index: int
) -> float:
    """Distance of a vertex from an edge's line, positive on the outward side."""
    n = edge_normal(edge_body, edge_index)
    o = edge_origin(edge_body, edge_index)
    p = world_vertex(vertex_body, vertex_index)
    return float(n @ (p - o))


def perp(v: np.ndarray) -> np.ndarray:
    """Rotate a vector (or rows of vectors) by +90 degrees."""
    v = np.asarray(v, dtype=float)
    return np.stack([-v[..., 1], v[..., 0]], axis=-1)
