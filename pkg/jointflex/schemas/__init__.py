"""File-facing pydantic models."""
from jointflex.schemas.scene import (
    SCHEMA_VERSION,
    BodyDTO,
    BoundsDTO,
    CameraDTO,
    FlockDTO,
    SceneFileDTO,
    scene_json_schema,
)
from jointflex.schemas.trace import IterationDTO, ObjectiveDTO, TraceFileDTO

__all__ = [
    "SCHEMA_VERSION",
    "BodyDTO",
    "BoundsDTO",
    "CameraDTO",
    "FlockDTO",
    "IterationDTO",
    "ObjectiveDTO",
    "SceneFileDTO",
    "TraceFileDTO",
    "scene_json_schema",
]
