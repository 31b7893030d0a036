"""Scene file data transfer objects."""
import math
from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

SCHEMA_VERSION = 1

Point = Tuple[float, float]


class BoundsDTO(BaseModel):
    """Uniform displacement box: translation (length units) and rotation (radians)."""
    model_config = ConfigDict(extra="forbid")

    translation: float = Field(ge=0)
    rotation: float = Field(ge=0)


class BodyDTO(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str = Field(min_length=1)
    vertices: List[Point] = Field(min_length=3)
    pose: Tuple[float, float, float] = (0.0, 0.0, 0.0)  # x, y, theta (radians)
    fixed: bool = False


class CameraDTO(BaseModel):
    model_config = ConfigDict(extra="forbid")

    apex: Point = (0.0, 0.5)
    heading: float = math.pi / 2
    half_angle: float = math.pi / 3


class FlockDTO(BaseModel):
    """Flock block; robots are referenced by body name.

    ``camera`` and ``marker`` apply to every robot without an entry in
    ``cameras`` / ``markers``.
    """
    model_config = ConfigDict(extra="forbid")

    leader: str
    predecessors: Dict[str, str] = Field(default_factory=dict)
    camera: CameraDTO = Field(default_factory=CameraDTO)
    cameras: Dict[str, CameraDTO] = Field(default_factory=dict)
    marker: Point = (0.0, -0.5)
    markers: Dict[str, Point] = Field(default_factory=dict)
    neighbors: Optional[int] = None
    theta_cap: Optional[float] = None
    leader_box: float = 0.5


class SceneFileDTO(BaseModel):
    model_config = ConfigDict(extra="forbid")

    schema_version: Literal[1] = SCHEMA_VERSION
    epsilon: Optional[float] = Field(default=None, gt=0)
    bounds: Optional[BoundsDTO] = None
    bodies: List[BodyDTO] = Field(min_length=1)
    flock: Optional[FlockDTO] = None

    @field_validator("bodies")
    @classmethod
    def validate_unique_names(cls, v: List[BodyDTO]) -> List[BodyDTO]:
        seen = set()
        for body in v:
            if body.name in seen:
                raise ValueError(f"duplicate body name {body.name!r}")
            seen.add(body.name)
        return v


def scene_json_schema() -> dict:
    """JSON schema of the scene file format, as shipped in the docs."""
    return SceneFileDTO.model_json_schema()
