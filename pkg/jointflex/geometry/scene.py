"""Poses, bodies and scenes.

All values are immutable; "modifying" a scene returns a new one.
"""
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Optional, Sequence

import numpy as np
from shapely.geometry import Polygon as ShapelyPolygon

from jointflex.geometry.polygon import Polygon, _frozen


@dataclass(frozen=True)
class Pose:
    x: float = 0.0
    y: float = 0.0
    theta: float = 0.0

    def __post_init__(self) -> None:
        if not all(math.isfinite(v) for v in (self.x, self.y, self.theta)):
            raise ValueError(f"pose must be finite, got {self.as_tuple()}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.theta)

    def moved(self, dx: float, dy: float, dtheta: float) -> "Pose":
        return Pose(self.x + dx, self.y + dy, self.theta + dtheta)


@dataclass(frozen=True)
class BoxLimits:
    """Uniform per-DOF displacement limits declared by a scene file."""

    translation: float
    rotation: float

    def __post_init__(self) -> None:
        if self.translation < 0 or self.rotation < 0:
            raise ValueError("displacement limits must be non-negative")


@dataclass(frozen=True, eq=False)
class Body:
    polygon: Polygon
    pose: Pose = field(default_factory=Pose)
    fixed: bool = False
    name: str = ""

    def with_pose(self, pose: Pose) -> "Body":
        return replace(self, pose=pose)

    @cached_property
    def offsets(self) -> np.ndarray:
        """World-frame vertex positions relative to the body origin."""
        phase = self.pose.theta + self.polygon.angles
        radii = self.polygon.radii
        return _frozen(np.column_stack([radii * np.cos(phase), radii * np.sin(phase)]))

    @cached_property
    def world_vertices(self) -> np.ndarray:
        return _frozen(self.offsets + np.array([self.pose.x, self.pose.y]))

    @cached_property
    def world_normals(self) -> np.ndarray:
        """Outward unit normals of every edge at the current pose."""
        diff = np.roll(self.offsets, -1, axis=0) - self.offsets
        a = self.polygon.inv_lengths
        return _frozen(np.column_stack([a * diff[:, 1], -a * diff[:, 0]]))

    @cached_property
    def world_shape(self) -> ShapelyPolygon:
        return ShapelyPolygon(self.world_vertices)

    @property
    def centroid_world(self) -> np.ndarray:
        cx, cy = self.polygon.centroid
        c, s = math.cos(self.pose.theta), math.sin(self.pose.theta)
        return np.array([self.pose.x + c * cx - s * cy, self.pose.y + s * cx + c * cy])

    def local_to_world(self, point: Sequence[float]) -> np.ndarray:
        c, s = math.cos(self.pose.theta), math.sin(self.pose.theta)
        px, py = point
        return np.array([self.pose.x + c * px - s * py, self.pose.y + s * px + c * py])

    @property
    def bbox(self) -> tuple[float, float, float, float]:
        w = self.world_vertices
        return (w[:, 0].min(), w[:, 1].min(), w[:, 0].max(), w[:, 1].max())


@dataclass(frozen=True, eq=False)
class Scene:
    """Ordered bodies plus the pair-selection radius.

    Free bodies own three consecutive LP columns (x, y, theta) in scene order.
    """

    bodies: tuple[Body, ...]
    epsilon: float = 0.1
    bounds: Optional[BoxLimits] = None
    _columns: tuple[Optional[int], ...] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        bodies = tuple(self.bodies)
        if not bodies:
            raise ValueError("a scene needs at least one body")
        if not (math.isfinite(self.epsilon) and self.epsilon > 0):
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        columns: list[Optional[int]] = []
        next_col = 0
        for body in bodies:
            if body.fixed:
                columns.append(None)
            else:
                columns.append(next_col)
                next_col += 3
        object.__setattr__(self, "bodies", bodies)
        object.__setattr__(self, "_columns", tuple(columns))

    def __len__(self) -> int:
        return len(self.bodies)

    @property
    def free_indices(self) -> tuple[int, ...]:
        return tuple(i for i, col in enumerate(self._columns) if col is not None)

    @property
    def n_free(self) -> int:
        return len(self.free_indices)

    @property
    def n_dof(self) -> int:
        return 3 * self.n_free

    def column_of(self, body_index: int) -> Optional[int]:
        """First LP column of a body, ``None`` for fixed bodies."""
        return self._columns[body_index]

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(b.name or str(i) for i, b in enumerate(self.bodies))

    def body_index(self, name: str) -> int:
        for i, label in enumerate(self.names):
            if label == name:
                return i
        raise KeyError(f"no body named {name!r}")

    @property
    def poses(self) -> tuple[Pose, ...]:
        return tuple(b.pose for b in self.bodies)

    def with_poses(self, poses: Sequence[Pose]) -> "Scene":
        if len(poses) != len(self.bodies):
            raise ValueError(f"expected {len(self.bodies)} poses, got {len(poses)}")
        bodies = tuple(b.with_pose(p) for b, p in zip(self.bodies, poses))
        return Scene(bodies=bodies, epsilon=self.epsilon, bounds=self.bounds)

    def with_bodies(self, bodies: Sequence[Body]) -> "Scene":
        return Scene(bodies=tuple(bodies), epsilon=self.epsilon, bounds=self.bounds)

    @cached_property
    def diameter(self) -> float:
        """Diagonal of the axis-aligned box around every body."""
        points = np.vstack([b.world_vertices for b in self.bodies])
        lo, hi = points.min(axis=0), points.max(axis=0)
        return float(np.hypot(*(hi - lo)))
