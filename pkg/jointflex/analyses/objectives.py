"""Objective generators: directional, radial and leader-x flex."""
from typing import Iterable, Optional, Sequence

import numpy as np

from jointflex.errors import InvalidObjectiveError
from jointflex.geometry.scene import Scene
from jointflex.lp.flex import Objective


def _free_column(scene: Scene, body: int) -> int:
    col = scene.column_of(body)
    if col is None:
        raise InvalidObjectiveError(f"body {scene.names[body]!r} is fixed and has no DOFs")
    return col


def direction_objective(
    scene: Scene, direction: Sequence[float], bodies: Iterable[int]
) -> Objective:
    """Weight ``direction`` on the translation DOFs of the chosen bodies."""
    vx, vy = (float(v) for v in direction)
    weights = np.zeros(scene.n_dof)
    for body in bodies:
        col = _free_column(scene, body)
        weights[col] = vx
        weights[col + 1] = vy
    return Objective(weights, provenance="direction")


def radial_objective(scene: Scene, center: Optional[Sequence[float]] = None) -> Objective:
    """Unit outward vector from ``center`` to each free body's centroid.

    The default center is the area-weighted centroid of all bodies.
    """
    if center is None:
        areas = np.array([b.polygon.area for b in scene.bodies])
        centroids = np.array([b.centroid_world for b in scene.bodies])
        origin = (areas[:, None] * centroids).sum(axis=0) / areas.sum()
    else:
        origin = np.asarray(center, dtype=float)
    weights = np.zeros(scene.n_dof)
    for body in scene.free_indices:
        offset = scene.bodies[body].centroid_world - origin
        length = float(np.hypot(*offset))
        if length == 0.0:
            continue
        col = scene.column_of(body)
        weights[col : col + 2] = offset / length
    return Objective(weights, provenance="radial")


def leader_x_objective(scene: Scene, leader: int) -> Objective:
    """Pull every free body's x toward the leader's: weight ``-sign(x_i - x_leader)``."""
    x_leader = scene.bodies[leader].centroid_world[0]
    weights = np.zeros(scene.n_dof)
    for body in scene.free_indices:
        if body == leader:
            continue
        weights[scene.column_of(body)] = -np.sign(scene.bodies[body].centroid_world[0] - x_leader)
    return Objective(weights, provenance="leader_x")


def make_objective(scene: Scene, kind: str, **options) -> Objective:
    """Dispatch on ``kind``: ``direction`` (direction, bodies), ``radial`` (center) or ``leader_x`` (leader).

    Raises:
        InvalidObjectiveError: unknown kind, fixed target body or all-zero weights.
    """
    try:
        if kind == "direction":
            return direction_objective(scene, options["direction"], options["bodies"])
        if kind == "radial":
            return radial_objective(scene, options.get("center"))
        if kind == "leader_x":
            return leader_x_objective(scene, options["leader"])
    except KeyError as exc:
        raise InvalidObjectiveError(f"{kind} objective needs option {exc}") from exc
    raise InvalidObjectiveError(f"Unknown objective kind: {kind}")
