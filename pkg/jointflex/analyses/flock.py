"""Leader-follower flock: field-of-view cones, neighbour half-planes, step caps."""
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np
from scipy import sparse

from jointflex.analyses.objectives import leader_x_objective
from jointflex.app_logging import get_logger
from jointflex.config import settings
from jointflex.constraints.rows import edge_vertex_rows
from jointflex.constraints.system import AuxiliaryRows, block_rows_to_csr
from jointflex.errors import InfeasibleFlockSpecError, InvalidObjectiveError
from jointflex.geometry.scene import Scene
from jointflex.lp.flex import Objective
from jointflex.stepper import StepParams, StepTrace, flex_iterate

logger = get_logger(__name__)


@dataclass(frozen=True)
class Camera:
    """View cone in the robot's local frame: apex, heading and half-angle (radians)."""

    apex: tuple[float, float] = (0.0, 0.5)
    heading: float = math.pi / 2
    half_angle: float = math.pi / 3


@dataclass(frozen=True, eq=False)
class FlockSpec:
    """Robots (body indices), the predecessor tree rooted at the leader and step limits."""

    leader: int
    predecessors: Mapping[int, int]
    cameras: Mapping[int, Camera]
    markers: Mapping[int, tuple[float, float]]
    neighbors: int = field(default_factory=lambda: settings.FLOCK_NEIGHBORS)
    theta_cap: float = field(default_factory=lambda: settings.FLOCK_THETA_CAP)
    leader_box: float = 0.5

    @property
    def robots(self) -> tuple[int, ...]:
        return tuple(sorted({self.leader, *self.predecessors.keys()}))

    @property
    def followers(self) -> tuple[int, ...]:
        return tuple(sorted(self.predecessors))


def check_flock_spec(spec: FlockSpec, scene: Scene) -> None:
    """Validate the tree, parameters, robot shapes and initial marker visibility.

    Raises:
        InfeasibleFlockSpecError: describing the first problem found.
    """
    robots = set(spec.robots)
    n = len(scene.bodies)
    if any(r < 0 or r >= n for r in robots | set(spec.predecessors.values())):
        raise InfeasibleFlockSpecError("flock references a body outside the scene")
    if spec.leader in spec.predecessors:
        raise InfeasibleFlockSpecError("the leader cannot have a predecessor")
    for robot in spec.predecessors:
        seen = {robot}
        node = robot
        while node != spec.leader:
            node = spec.predecessors.get(node, -1)
            if node == -1 or node in seen:
                raise InfeasibleFlockSpecError(
                    f"robot {scene.names[robot]!r} does not lead back to the leader"
                )
            seen.add(node)
    if spec.neighbors < 1:
        raise InfeasibleFlockSpecError("neighbour count must be at least 1")
    if spec.theta_cap <= 0 or spec.leader_box <= 0:
        raise InfeasibleFlockSpecError("rotation cap and leader box must be positive")
    for robot in spec.followers:
        camera = spec.cameras.get(robot)
        if camera is None:
            raise InfeasibleFlockSpecError(f"robot {scene.names[robot]!r} has no camera")
        if not 0 < camera.half_angle <= math.pi / 2:
            raise InfeasibleFlockSpecError("cone half-angle must lie in (0, pi/2]")
        if spec.predecessors[robot] not in spec.markers:
            raise InfeasibleFlockSpecError(
                f"robot {scene.names[spec.predecessors[robot]]!r} has no marker"
            )
    for robot in robots:
        if not scene.bodies[robot].polygon.is_convex:
            raise InfeasibleFlockSpecError(f"robot {scene.names[robot]!r} is not convex")

    distances = cone_distances(spec, scene)
    if distances.size and distances.min() < -settings.PENETRATION_TOLERANCE:
        worst = spec.followers[int(np.argmin(distances)) // 2]
        raise InfeasibleFlockSpecError(
            f"marker of {scene.names[spec.predecessors[worst]]!r} starts outside "
            f"the view cone of {scene.names[worst]!r}"
        )


def _column(scene: Scene, body: int) -> int:
    col = scene.column_of(body)
    return -1 if col is None else col


def _cone_terms(spec: FlockSpec, scene: Scene):
    normals, anchors, edge_origins, points, vertex_origins = [], [], [], [], []
    owners, targets = [], []
    for robot in spec.followers:
        body = scene.bodies[robot]
        camera = spec.cameras[robot]
        predecessor = spec.predecessors[robot]
        marker = scene.bodies[predecessor].local_to_world(spec.markers[predecessor])
        apex = body.local_to_world(camera.apex)
        for side in (1.0, -1.0):
            # Left ray runs apex -> apex + u, right ray apex + u -> apex; both
            # line normals then face into the cone.
            angle = body.pose.theta + camera.heading + side * camera.half_angle
            normals.append((side * math.sin(angle), -side * math.cos(angle)))
            anchors.append(apex)
            edge_origins.append((body.pose.x, body.pose.y))
            points.append(marker)
            vertex_origins.append(
                (scene.bodies[predecessor].pose.x, scene.bodies[predecessor].pose.y)
            )
            owners.append(robot)
            targets.append(predecessor)
    if not normals:
        return None, [], []
    terms = edge_vertex_rows(
        np.asarray(normals),
        np.asarray(anchors),
        np.asarray(edge_origins, dtype=float),
        np.asarray(points),
        np.asarray(vertex_origins, dtype=float),
    )
    return terms, owners, targets


def cone_distances(spec: FlockSpec, scene: Scene) -> np.ndarray:
    """Signed distances of each marker from its observer's two cone rays (left, right)."""
    terms, _, _ = _cone_terms(spec, scene)
    return np.zeros(0) if terms is None else terms.distance


def cone_violation(spec: FlockSpec, scene: Scene) -> float:
    distances = cone_distances(spec, scene)
    return max(0.0, -float(distances.min())) if distances.size else 0.0


def nearest_neighbors(spec: FlockSpec, scene: Scene) -> list[tuple[int, int]]:
    """Unordered robot pairs where one is among the other's k nearest by centroid."""
    robots = spec.robots
    if len(robots) < 2:
        return []
    centroids = np.array([scene.bodies[r].centroid_world for r in robots])
    dist = np.hypot(*(centroids[:, None, :] - centroids[None, :, :]).transpose(2, 0, 1))
    np.fill_diagonal(dist, np.inf)
    k = min(spec.neighbors, len(robots) - 1)
    order = np.argsort(dist, axis=1, kind="stable")[:, :k]
    pairs = {
        tuple(sorted((robots[i], robots[j]))) for i in range(len(robots)) for j in order[i]
    }
    return sorted(pairs)


def separating_edge(scene: Scene, a: int, b: int) -> tuple[int, int, int]:
    """(edge body, edge, vertex body) whose edge leaves the other body farthest outside."""
    best: Optional[tuple[float, int, int, int]] = None
    for edge_body, vertex_body in ((a, b), (b, a)):
        corners = scene.bodies[edge_body].world_vertices
        normals = scene.bodies[edge_body].world_normals
        points = scene.bodies[vertex_body].world_vertices
        gaps = np.einsum("evk,ek->ev", points[None] - corners[:, None], normals).min(axis=1)
        edge = int(np.argmax(gaps))
        if best is None or gaps[edge] > best[0]:
            best = (float(gaps[edge]), edge_body, edge, vertex_body)
    return best[1], best[2], best[3]


def _neighbor_rows(spec: FlockSpec, scene: Scene) -> tuple[list, list]:
    rows, labels = [], []
    for a, b in nearest_neighbors(spec, scene):
        edge_body, edge, vertex_body = separating_edge(scene, a, b)
        eb, vb = scene.bodies[edge_body], scene.bodies[vertex_body]
        count = vb.polygon.n_vertices
        terms = edge_vertex_rows(
            np.repeat(eb.world_normals[edge][None], count, axis=0),
            np.repeat(eb.world_vertices[edge][None], count, axis=0),
            np.repeat([[eb.pose.x, eb.pose.y]], count, axis=0),
            vb.world_vertices,
            np.repeat([[vb.pose.x, vb.pose.y]], count, axis=0),
        )
        rows.append((edge_body, vertex_body, terms))
        labels.extend(
            f"nbr:{scene.names[edge_body]}.edge{edge}|{scene.names[vertex_body]}.v{v}"
            for v in range(count)
        )
    return rows, labels


def _single_column_rows(entries: list[tuple[int, float, float]], n_cols: int) -> sparse.csr_matrix:
    """One row per ``(column, coefficient, d0)`` entry."""
    if not entries:
        return sparse.csr_matrix((0, n_cols))
    cols = [c for c, _, _ in entries]
    data = [v for _, v, _ in entries]
    return sparse.csr_matrix(
        (data, (np.arange(len(entries)), cols)), shape=(len(entries), n_cols)
    )


def flock_constraints(spec: FlockSpec, scene: Scene) -> AuxiliaryRows:
    """Cone, neighbour, rotation-cap and leader-box rows at the current poses."""
    n_cols = scene.n_dof
    blocks_edge_cols, blocks_edge_vals = [], []
    blocks_vertex_cols, blocks_vertex_vals = [], []
    d0_parts, labels = [], []

    terms, owners, targets = _cone_terms(spec, scene)
    if terms is not None:
        blocks_edge_cols.append(np.array([_column(scene, o) for o in owners]))
        blocks_edge_vals.append(terms.edge_gradient)
        blocks_vertex_cols.append(np.array([_column(scene, t) for t in targets]))
        blocks_vertex_vals.append(terms.vertex_gradient)
        d0_parts.append(terms.distance)
        labels.extend(
            f"cone:{scene.names[o]}{'L' if k % 2 == 0 else 'R'}|{scene.names[t]}.marker"
            for k, (o, t) in enumerate(zip(owners, targets))
        )

    neighbor_rows, neighbor_labels = _neighbor_rows(spec, scene)
    for edge_body, vertex_body, nterms in neighbor_rows:
        count = len(nterms.distance)
        blocks_edge_cols.append(np.full(count, _column(scene, edge_body)))
        blocks_edge_vals.append(nterms.edge_gradient)
        blocks_vertex_cols.append(np.full(count, _column(scene, vertex_body)))
        blocks_vertex_vals.append(nterms.vertex_gradient)
        d0_parts.append(nterms.distance)
    labels.extend(neighbor_labels)

    if d0_parts:
        # Rows between two fixed bodies carry no columns; drop them.
        edge_cols = np.concatenate(blocks_edge_cols)
        vertex_cols = np.concatenate(blocks_vertex_cols)
        live = (edge_cols >= 0) | (vertex_cols >= 0)
        pair_rows = AuxiliaryRows(
            np.concatenate(d0_parts)[live],
            block_rows_to_csr(
                n_cols,
                [
                    (edge_cols[live], np.vstack(blocks_edge_vals)[live]),
                    (vertex_cols[live], np.vstack(blocks_vertex_vals)[live]),
                ],
            ),
            tuple(label for label, keep in zip(labels, live) if keep),
        )
    else:
        pair_rows = AuxiliaryRows.empty(n_cols)

    caps: list[tuple[int, float, float]] = []
    cap_labels: list[str] = []
    for robot in spec.robots:
        col = scene.column_of(robot)
        if col is None:
            continue
        for sign in (1.0, -1.0):
            caps.append((col + 2, sign, spec.theta_cap))
            cap_labels.append(f"cap:{scene.names[robot]}{'+' if sign > 0 else '-'}")
    leader_col = scene.column_of(spec.leader)
    if leader_col is not None:
        for offset, axis in ((0, "x"), (1, "y")):
            for sign in (1.0, -1.0):
                caps.append((leader_col + offset, sign, spec.leader_box))
                cap_labels.append(f"box:{axis}{'+' if sign > 0 else '-'}")
    cap_rows = AuxiliaryRows(
        np.array([d for _, _, d in caps], dtype=float),
        _single_column_rows(caps, n_cols),
        tuple(cap_labels),
    )
    return pair_rows.concat(cap_rows)


def leader_sides(spec: FlockSpec, scene: Scene) -> dict[int, float]:
    """Side (+1 or -1) of the leader's x each off-axis follower starts on."""
    x_leader = scene.bodies[spec.leader].centroid_world[0]
    sides = {}
    for robot in spec.followers:
        side = float(np.sign(scene.bodies[robot].centroid_world[0] - x_leader))
        if side != 0.0:
            sides[robot] = side
    return sides


def _side_gaps(spec: FlockSpec, scene: Scene, sides: Mapping[int, float]) -> np.ndarray:
    x_leader = scene.bodies[spec.leader].centroid_world[0]
    return np.array(
        [side * (scene.bodies[robot].centroid_world[0] - x_leader) for robot, side in sides.items()]
    )


def side_rows(spec: FlockSpec, scene: Scene, sides: Mapping[int, float]) -> AuxiliaryRows:
    """Rows keeping each follower on its starting side of the leader's x.

    Linear in the centroid motion, so translations are exact.
    """
    n_cols = scene.n_dof
    if not sides:
        return AuxiliaryRows.empty(n_cols)
    leader_col = scene.column_of(spec.leader)
    leader = scene.bodies[spec.leader]
    leader_lever = leader.centroid_world[1] - leader.pose.y
    rows, cols, data, labels = [], [], [], []
    for k, (robot, side) in enumerate(sides.items()):
        col = scene.column_of(robot)
        body = scene.bodies[robot]
        if col is not None:
            rows += [k, k]
            cols += [col, col + 2]
            data += [side, -side * (body.centroid_world[1] - body.pose.y)]
        if leader_col is not None:
            rows += [k, k]
            cols += [leader_col, leader_col + 2]
            data += [-side, side * leader_lever]
        labels.append(f"side:{scene.names[robot]}")
    jacobian = sparse.csr_matrix((data, (rows, cols)), shape=(len(sides), n_cols))
    return AuxiliaryRows(_side_gaps(spec, scene, sides), jacobian, tuple(labels))


def side_violation(spec: FlockSpec, scene: Scene, sides: Mapping[int, float]) -> float:
    gaps = _side_gaps(spec, scene, sides)
    return max(0.0, -float(gaps.min())) if gaps.size else 0.0


def x_spread(spec: FlockSpec, scene: Scene) -> float:
    xs = [scene.bodies[r].centroid_world[0] for r in spec.robots]
    return float(max(xs) - min(xs))


def run_flock(
    scene: Scene, spec: FlockSpec, params: Optional[StepParams] = None
) -> StepTrace:
    """Flex the flock toward the leader's x while keeping every marker in view.

    The leader-x weights are rebuilt from the current poses at every step and
    no follower may cross to the other side of the leader's x.
    """
    check_flock_spec(spec, scene)
    start = x_spread(spec, scene)
    sides = leader_sides(spec, scene)

    def pull(current: Scene) -> Optional[Objective]:
        try:
            return leader_x_objective(current, spec.leader)
        except InvalidObjectiveError:
            # every robot already shares the leader's x
            return None

    trace = flex_iterate(
        scene,
        leader_x_objective(scene, spec.leader),
        params,
        extra_rows=lambda current: flock_constraints(spec, current).concat(
            side_rows(spec, current, sides)
        ),
        extra_violation=lambda current: max(
            cone_violation(spec, current), side_violation(spec, current, sides)
        ),
        objective_hook=pull,
    )
    logger.info(
        f"Flock x-spread {start:.4g} -> {x_spread(spec, trace.final):.4g} "
        f"in {trace.n_iterations} iterations"
    )
    return trace
