"""Scene documents: JSON text <-> validated scenes."""
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np
import orjson
import shapely
from pydantic import ValidationError

from jointflex.analyses.flock import Camera, FlockSpec
from jointflex.app_logging import get_logger
from jointflex.config import settings
from jointflex.errors import InitialPenetrationError, SceneFormatError
from jointflex.geometry.overlap import PairPenetration, penetrating_pairs
from jointflex.geometry.polygon import Polygon
from jointflex.geometry.scene import Body, BoxLimits, Pose, Scene
from jointflex.schemas.scene import (
    BodyDTO,
    BoundsDTO,
    CameraDTO,
    FlockDTO,
    SceneFileDTO,
)

logger = get_logger(__name__)

PathLike = Union[str, Path]


@dataclass(frozen=True, eq=False)
class SceneDocument:
    scene: Scene
    flock: Optional[FlockSpec]
    names: tuple[str, ...]


def validation_error(exc: ValidationError) -> SceneFormatError:
    """First pydantic error as a SceneFormatError naming the offending field."""
    first = exc.errors()[0]
    field = ".".join(str(part) for part in first["loc"]) or None
    return SceneFormatError(first["msg"], field=field)


def _load_json(text: Union[str, bytes]) -> object:
    try:
        return orjson.loads(text)
    except orjson.JSONDecodeError as exc:
        raise SceneFormatError(f"malformed JSON: {exc}") from exc


def _penetration_error(scene: Scene, hit: PairPenetration) -> InitialPenetrationError:
    """Locate a representative vertex/edge for an overlapping body pair."""
    a, b = scene.bodies[hit.body_a], scene.bodies[hit.body_b]
    for outer_index, inner_index, outer, inner in (
        (hit.body_a, hit.body_b, a, b),
        (hit.body_b, hit.body_a, b, a),
    ):
        points = inner.world_vertices
        inside = np.flatnonzero(shapely.contains_xy(outer.world_shape, points[:, 0], points[:, 1]))
        if inside.size:
            vertex = int(inside[0])
            break
    else:
        outer_index, inner_index, outer, inner = hit.body_a, hit.body_b, a, b
        vertex = int(np.argmin(shapely.distance(outer.world_shape, shapely.points(inner.world_vertices))))
    gaps = np.einsum(
        "ek,ek->e", inner.world_vertices[vertex] - outer.world_vertices, outer.world_normals
    )
    names = scene.names
    return InitialPenetrationError(
        outer_index,
        int(np.argmax(gaps)),
        inner_index,
        vertex,
        hit.depth,
        names=(names[outer_index], names[inner_index]),
    )


def check_initial_overlap(scene: Scene, tolerance: Optional[float] = None) -> None:
    """Raise InitialPenetrationError for the deepest overlapping body pair."""
    tolerance = settings.PENETRATION_TOLERANCE if tolerance is None else tolerance
    hits = penetrating_pairs(scene, tolerance)
    if hits:
        raise _penetration_error(scene, max(hits, key=lambda h: h.depth))


def _flock_from_dto(dto: FlockDTO, scene: Scene) -> FlockSpec:
    def index(name: str) -> int:
        try:
            return scene.body_index(name)
        except KeyError as exc:
            raise SceneFormatError(f"unknown body {name!r}", field="flock") from exc

    def camera(c: CameraDTO) -> Camera:
        return Camera(apex=tuple(c.apex), heading=c.heading, half_angle=c.half_angle)

    predecessors = {index(k): index(v) for k, v in dto.predecessors.items()}
    robots = {index(dto.leader), *predecessors}
    overrides = {index(k): camera(c) for k, c in dto.cameras.items()}
    markers = {index(k): tuple(m) for k, m in dto.markers.items()}
    options = {}
    if dto.neighbors is not None:
        options["neighbors"] = dto.neighbors
    if dto.theta_cap is not None:
        options["theta_cap"] = dto.theta_cap
    return FlockSpec(
        leader=index(dto.leader),
        predecessors=predecessors,
        cameras={r: overrides.get(r, camera(dto.camera)) for r in predecessors},
        markers={r: markers.get(r, tuple(dto.marker)) for r in sorted(robots)},
        leader_box=dto.leader_box,
        **options,
    )


def scene_from_dto(dto: SceneFileDTO) -> SceneDocument:
    bodies = tuple(
        Body(Polygon.from_vertices(b.vertices, b.name), Pose(*b.pose), b.fixed, b.name)
        for b in dto.bodies
    )
    bounds = BoxLimits(dto.bounds.translation, dto.bounds.rotation) if dto.bounds else None
    epsilon = dto.epsilon if dto.epsilon is not None else settings.DEFAULT_EPSILON
    scene = Scene(bodies, epsilon=epsilon, bounds=bounds)
    check_initial_overlap(scene)
    flock = _flock_from_dto(dto.flock, scene) if dto.flock is not None else None
    return SceneDocument(scene, flock, scene.names)


def parse_scene_document(text: Union[str, bytes]) -> SceneDocument:
    """Parse and validate a scene file.

    Raises:
        SceneFormatError: malformed JSON, unknown field or schema violation.
        InvalidPolygonError: a body's vertex loop is invalid.
        InitialPenetrationError: two bodies overlap beyond tolerance.
    """
    try:
        dto = SceneFileDTO.model_validate(_load_json(text))
    except ValidationError as exc:
        raise validation_error(exc) from exc
    document = scene_from_dto(dto)
    logger.info(
        f"Parsed scene with {len(document.scene)} bodies "
        f"({document.scene.n_free} free, {document.scene.n_dof} DOFs)"
    )
    return document


def parse_scene(text: Union[str, bytes]) -> Scene:
    return parse_scene_document(text).scene


def _flock_to_dto(spec: FlockSpec, names: tuple[str, ...]) -> FlockDTO:
    def camera(c: Camera) -> CameraDTO:
        return CameraDTO(apex=c.apex, heading=c.heading, half_angle=c.half_angle)

    return FlockDTO(
        leader=names[spec.leader],
        predecessors={names[k]: names[v] for k, v in sorted(spec.predecessors.items())},
        cameras={names[k]: camera(c) for k, c in sorted(spec.cameras.items())},
        markers={names[k]: tuple(m) for k, m in sorted(spec.markers.items())},
        neighbors=spec.neighbors,
        theta_cap=spec.theta_cap,
        leader_box=spec.leader_box,
    )


def scene_to_dto(scene: Scene, flock: Optional[FlockSpec] = None) -> SceneFileDTO:
    names = scene.names
    return SceneFileDTO(
        epsilon=scene.epsilon,
        bounds=(
            BoundsDTO(translation=scene.bounds.translation, rotation=scene.bounds.rotation)
            if scene.bounds
            else None
        ),
        bodies=[
            BodyDTO(
                name=names[i],
                vertices=[tuple(v) for v in b.polygon.vertices.tolist()],
                pose=b.pose.as_tuple(),
                fixed=b.fixed,
            )
            for i, b in enumerate(scene.bodies)
        ],
        flock=_flock_to_dto(flock, names) if flock is not None else None,
    )


def dump_json(model) -> str:
    return orjson.dumps(
        model.model_dump(mode="json", exclude_none=True), option=orjson.OPT_INDENT_2
    ).decode()


def serialize_scene(scene: Scene, flock: Optional[FlockSpec] = None) -> str:
    return dump_json(scene_to_dto(scene, flock))


def load_scene(path: PathLike) -> SceneDocument:
    return parse_scene_document(Path(path).read_bytes())


def save_scene(path: PathLike, scene: Scene, flock: Optional[FlockSpec] = None) -> None:
    Path(path).write_text(serialize_scene(scene, flock))
    logger.info(f"Wrote scene to {path}")
