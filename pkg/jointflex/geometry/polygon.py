"""Body-local polygons: validation, polar form, corner classification, insetting."""
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Optional, Sequence

import numpy as np
import shapely
from shapely.geometry import LinearRing
from shapely.geometry import Polygon as ShapelyPolygon
from shapely.validation import explain_validity

from jointflex.app_logging import get_logger
from jointflex.config import settings
from jointflex.errors import InsetCollapseError, InvalidPolygonError, VertexIndexError

logger = get_logger(__name__)


class CornerKind(str, Enum):
    CONVEX = "convex"
    CONCAVE = "concave"
    FLAT = "flat"


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


def signed_area(vertices: np.ndarray) -> float:
    """Shoelace area, positive for counter-clockwise loops."""
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


@dataclass(frozen=True, eq=False)
class Polygon:
    """Counter-clockwise simple polygon in its body's local frame.

    Edge ``i`` runs from vertex ``i`` to vertex ``(i + 1) % n``. Build through
    :meth:`from_vertices`, which validates and normalises orientation.
    """

    vertices: np.ndarray
    name: Optional[str] = None
    radii: np.ndarray = field(init=False, repr=False)
    angles: np.ndarray = field(init=False, repr=False)
    lengths: np.ndarray = field(init=False, repr=False)
    inv_lengths: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        vertices = _frozen(np.array(self.vertices, dtype=float))
        edges = np.roll(vertices, -1, axis=0) - vertices
        lengths = np.hypot(edges[:, 0], edges[:, 1])
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "radii", _frozen(np.hypot(vertices[:, 0], vertices[:, 1])))
        object.__setattr__(
            self, "angles", _frozen(np.arctan2(vertices[:, 1], vertices[:, 0]))
        )
        object.__setattr__(self, "lengths", _frozen(lengths))
        with np.errstate(divide="ignore"):
            object.__setattr__(self, "inv_lengths", _frozen(1.0 / lengths))

    @classmethod
    def from_vertices(
        cls, points: Sequence[Sequence[float]], name: Optional[str] = None
    ) -> "Polygon":
        """Validate a vertex loop and return a CCW polygon.

        Args:
            points: Body-local vertex coordinates, either orientation.
            name: Owning body name, used in error messages.

        Returns:
            Polygon with counter-clockwise vertex order.

        Raises:
            InvalidPolygonError: fewer than three vertices, non-finite
                coordinates, zero-length edge or self-intersection.
        """
        vertices = np.asarray(points, dtype=float)
        if vertices.ndim != 2 or vertices.shape[1] != 2:
            raise InvalidPolygonError("vertices must be a list of [x, y] pairs", name)
        if len(vertices) < 3:
            raise InvalidPolygonError("a polygon needs at least 3 vertices", name)
        if not np.all(np.isfinite(vertices)):
            raise InvalidPolygonError("vertex coordinates must be finite", name)

        edges = np.roll(vertices, -1, axis=0) - vertices
        short = np.flatnonzero(np.hypot(edges[:, 0], edges[:, 1]) <= 0.0)
        if short.size:
            i = int(short[0])
            raise InvalidPolygonError(
                f"zero-length edge {i} at {vertices[i].tolist()}", name
            )

        if not LinearRing(vertices).is_simple:
            reason = explain_validity(ShapelyPolygon(vertices))
            raise InvalidPolygonError(f"self-intersecting boundary ({reason})", name)

        area = signed_area(vertices)
        if area == 0.0:
            raise InvalidPolygonError("polygon has zero area", name)
        if area < 0.0:
            logger.warning(f"Polygon {name or '<unnamed>'} is clockwise; reversing")
            vertices = vertices[::-1].copy()

        return cls(vertices=vertices, name=name)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def check_index(self, index: int) -> int:
        if not -self.n_vertices <= index < self.n_vertices:
            raise VertexIndexError(
                f"index {index} out of range for {self.n_vertices}-gon"
                + (f" {self.name!r}" if self.name else "")
            )
        return index % self.n_vertices

    @cached_property
    def local_shape(self) -> ShapelyPolygon:
        return ShapelyPolygon(self.vertices)

    @property
    def area(self) -> float:
        return signed_area(self.vertices)

    @property
    def perimeter(self) -> float:
        return float(self.lengths.sum())

    @cached_property
    def centroid(self) -> np.ndarray:
        c = self.local_shape.centroid
        return _frozen(np.array([c.x, c.y]))

    @cached_property
    def corner_kinds(self) -> tuple[CornerKind, ...]:
        return tuple(classify_corner(self, i) for i in range(self.n_vertices))

    @property
    def is_convex(self) -> bool:
        return CornerKind.CONCAVE not in self.corner_kinds

    def edge_directions(self) -> np.ndarray:
        edges = np.roll(self.vertices, -1, axis=0) - self.vertices
        return edges * self.inv_lengths[:, None]


def classify_corner(
    polygon: Polygon, vertex_index: int, tolerance: Optional[float] = None
) -> CornerKind:
    """Classify a vertex by the turn between its incoming and outgoing edges."""
    tol = settings.FLAT_CORNER_TOLERANCE if tolerance is None else tolerance
    i = polygon.check_index(vertex_index)
    n = polygon.n_vertices
    v_prev, v, v_next = polygon.vertices[(i - 1) % n], polygon.vertices[i], polygon.vertices[(i + 1) % n]
    u_in = (v - v_prev) / polygon.lengths[(i - 1) % n]
    u_out = (v_next - v) / polygon.lengths[i]
    cross = u_in[0] * u_out[1] - u_in[1] * u_out[0]
    if abs(cross) <= tol:
        return CornerKind.FLAT
    return CornerKind.CONVEX if cross > 0 else CornerKind.CONCAVE


def inset_polygon(polygon: Polygon, t: float) -> Polygon:
    """Offset every edge inward by ``t`` and re-intersect neighbouring lines.

    Raises:
        ValueError: ``t`` is negative.
        InsetCollapseError: the offset flips an edge, self-intersects or
            loses all area.
    """
    if t < 0:
        raise ValueError(f"inset depth must be non-negative, got {t}")
    if t == 0:
        return polygon

    directions = polygon.edge_directions()
    normals = np.column_stack([directions[:, 1], -directions[:, 0]])
    anchors = polygon.vertices - t * normals

    prev_dir = np.roll(directions, 1, axis=0)
    prev_anchor = np.roll(anchors, 1, axis=0)
    denom = prev_dir[:, 0] * directions[:, 1] - prev_dir[:, 1] * directions[:, 0]
    delta = anchors - prev_anchor
    numer = delta[:, 0] * directions[:, 1] - delta[:, 1] * directions[:, 0]

    parallel = np.abs(denom) <= settings.FLAT_CORNER_TOLERANCE
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(parallel, 0.0, numer / np.where(parallel, 1.0, denom))
    vertices = np.where(parallel[:, None], anchors, prev_anchor + s[:, None] * prev_dir)

    new_edges = np.roll(vertices, -1, axis=0) - vertices
    if np.any(np.einsum("ij,ij->i", new_edges, directions) <= 0.0):
        raise InsetCollapseError(
            f"inset {t} of polygon {polygon.name or '<unnamed>'} reverses an edge"
        )
    if not shapely.is_valid(ShapelyPolygon(vertices)):
        raise InsetCollapseError(
            f"inset {t} of polygon {polygon.name or '<unnamed>'} self-intersects"
        )
    if signed_area(vertices) <= 0.0:
        raise InsetCollapseError(
            f"inset {t} of polygon {polygon.name or '<unnamed>'} has no area left"
        )
    return Polygon(vertices=vertices, name=polygon.name)
