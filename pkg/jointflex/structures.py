"""Generators for reference assemblies, flocks and the single-link arm system."""
import math
from typing import Optional

import numpy as np
from scipy import sparse

from jointflex.analyses.flock import Camera, FlockSpec
from jointflex.config import settings
from jointflex.constraints.rows import edge_vertex_rows
from jointflex.constraints.system import DistanceSystem
from jointflex.geometry.polygon import Polygon, inset_polygon
from jointflex.geometry.scene import Body, BoxLimits, Pose, Scene


def rectangle(width: float, height: float, x0: float = 0.0, y0: float = 0.0, name: Optional[str] = None) -> Polygon:
    return Polygon.from_vertices(
        [(x0, y0), (x0 + width, y0), (x0 + width, y0 + height), (x0, y0 + height)], name
    )


def square(size: float = 1.0, centered: bool = False, name: Optional[str] = None) -> Polygon:
    offset = -size / 2 if centered else 0.0
    return rectangle(size, size, offset, offset, name)


def l_shape(name: Optional[str] = None) -> Polygon:
    """2x2 square with the upper-right unit cell removed; vertex 3 is the notch."""
    return Polygon.from_vertices([(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)], name)


def puzzle_piece(
    clearance: float = 0.02, tab_width: float = 0.3, tab_depth: float = 0.2, name: Optional[str] = None
) -> Polygon:
    """Unit cell with tabs on the right and top and matching notches on the left and bottom.

    The tight outline is inset by half the clearance so neighbouring cells
    keep a uniform gap of ``clearance``.
    """
    a = 0.5 - tab_width / 2
    b = 0.5 + tab_width / 2
    h = tab_depth
    outline = [
        (0, 0), (a, 0), (a, h), (b, h), (b, 0),
        (1, 0), (1, a), (1 + h, a), (1 + h, b), (1, b),
        (1, 1), (b, 1), (b, 1 + h), (a, 1 + h), (a, 1),
        (0, 1), (0, b), (h, b), (h, a), (0, a),
    ]
    return inset_polygon(Polygon.from_vertices(outline, name), clearance / 2)


def two_squares(gap: float = 0.05, epsilon: float = 0.1) -> Scene:
    """Free unit square ``A`` beside fixed unit square ``B``; A may only translate."""
    bodies = (
        Body(square(name="A"), Pose(0.0, 0.0, 0.0), fixed=False, name="A"),
        Body(square(name="B"), Pose(1.0 + gap, 0.0, 0.0), fixed=True, name="B"),
    )
    return Scene(bodies, epsilon=epsilon, bounds=BoxLimits(translation=1.0, rotation=0.0))


def block_in_cavity(
    delta: float, wall: float = 0.5, epsilon: float = 0.25, bounds: Optional[BoxLimits] = None
) -> Scene:
    """Free unit block centred in a fixed square hole with uniform gap ``delta``.

    The block is body 0 with its origin at its lower-left corner.
    """
    inner = 1.0 + 2.0 * delta
    w = wall
    walls = {
        "wall_bottom": rectangle(inner + 2 * w, w, -w, -w),
        "wall_top": rectangle(inner + 2 * w, w, -w, inner),
        "wall_left": rectangle(w, inner, -w, 0.0),
        "wall_right": rectangle(w, inner, inner, 0.0),
    }
    bodies = [Body(square(name="block"), Pose(delta, delta, 0.0), name="block")]
    bodies += [Body(poly, Pose(), fixed=True, name=name) for name, poly in walls.items()]
    return Scene(tuple(bodies), epsilon=epsilon, bounds=bounds)


def square_ring(n_side: int = 4, gap: float = 0.02, epsilon: float = 0.1) -> Scene:
    """Free unit squares around the border of an ``n_side`` x ``n_side`` grid."""
    pitch = 1.0 + gap
    cells = [
        (c, r)
        for r in range(n_side)
        for c in range(n_side)
        if r in (0, n_side - 1) or c in (0, n_side - 1)
    ]
    bodies = tuple(
        Body(square(name=f"s{r}_{c}"), Pose(c * pitch, r * pitch, 0.0), name=f"s{r}_{c}")
        for c, r in cells
    )
    return Scene(bodies, epsilon=epsilon)


def puzzle_grid(
    n: int, clearance: float = 0.02, epsilon: float = 0.1, columns: Optional[int] = None
) -> Scene:
    """``n`` interlocking puzzle pieces filled row by row; piece 0 is fixed."""
    if n < 1:
        raise ValueError("a grid needs at least one piece")
    cols = columns or math.ceil(math.sqrt(n))
    piece = puzzle_piece(clearance)
    bodies = []
    for k in range(n):
        r, c = divmod(k, cols)
        name = f"p{r}_{c}"
        bodies.append(Body(piece, Pose(float(c), float(r), 0.0), fixed=(k == 0), name=name))
    return Scene(tuple(bodies), epsilon=epsilon)


def flock_formation(
    rows: int = 8,
    spacing: tuple[float, float] = (2.0, 3.0),
    half_angle: float = math.pi / 3,
    epsilon: float = 0.25,
    neighbors: int = 5,
    theta_cap: Optional[float] = None,
    leader_box: float = 0.5,
) -> tuple[Scene, FlockSpec]:
    """Triangular flock: row ``r`` holds ``2r + 1`` unit-square robots facing +y.

    The leader is row 0; robot ``(r, k)`` follows ``(r - 1, clamp(k - 1))``.
    Cameras sit at the front centre, markers at the rear centre.
    """
    sx, sy = spacing
    bodies, index = [], {}
    for r in range(rows):
        for k in range(2 * r + 1):
            name = "leader" if r == 0 else f"r{r}_{k}"
            index[(r, k)] = len(bodies)
            bodies.append(
                Body(square(centered=True, name=name), Pose((k - r) * sx, -r * sy, 0.0), name=name)
            )
    predecessors = {
        index[(r, k)]: index[(r - 1, min(max(k - 1, 0), 2 * (r - 1)))]
        for r in range(1, rows)
        for k in range(2 * r + 1)
    }
    camera = Camera(apex=(0.0, 0.5), heading=math.pi / 2, half_angle=half_angle)
    spec = FlockSpec(
        leader=index[(0, 0)],
        predecessors=predecessors,
        cameras={i: camera for i in predecessors},
        markers={i: (0.0, -0.5) for i in range(len(bodies))},
        neighbors=neighbors,
        theta_cap=settings.FLOCK_THETA_CAP if theta_cap is None else theta_cap,
        leader_box=leader_box,
    )
    return Scene(tuple(bodies), epsilon=epsilon), spec


def one_r_arm_system(
    theta: float = math.pi / 4, length: float = 2.0, box: tuple[float, float] = (1.0, 2.0)
) -> DistanceSystem:
    """Single revolute link whose tip sits inside a fixed square window.

    One column (the joint angle); rows are the bottom, right, top and left
    window walls with normals pointing into the window.
    """
    lo, hi = box
    tip = np.array([length * math.cos(theta), length * math.sin(theta)])
    normals = np.array([(0.0, 1.0), (-1.0, 0.0), (0.0, -1.0), (1.0, 0.0)])
    anchors = np.array([(lo, lo), (hi, lo), (hi, hi), (lo, hi)])
    zeros = np.zeros((4, 2))
    terms = edge_vertex_rows(normals, anchors, zeros, np.repeat(tip[None], 4, axis=0), zeros)
    jacobian = sparse.csr_matrix(terms.vertex_gradient[:, 2:3])
    return DistanceSystem(
        pairs=(),
        d0=terms.distance,
        jacobian=jacobian,
        labels=("bottom", "right", "top", "left"),
        column_kinds=("theta",),
        column_bodies=(0,),
    )
