"""Trace file data transfer objects."""
from typing import Any, Dict, List, Literal, Tuple

from pydantic import BaseModel, ConfigDict, Field

from jointflex.schemas.scene import SCHEMA_VERSION, SceneFileDTO


class ObjectiveDTO(BaseModel):
    model_config = ConfigDict(extra="forbid")

    weights: List[float]
    provenance: str = "direct"


class IterationDTO(BaseModel):
    """One accepted step: LP value, chosen scale, realized gain and resulting poses."""
    model_config = ConfigDict(extra="forbid")

    index: int
    lp_objective: float
    scale: float
    gain: float
    violation: float
    n_rows: int
    poses: List[Tuple[float, float, float]]
    timings: Dict[str, float] = Field(default_factory=dict)


class TraceFileDTO(BaseModel):
    model_config = ConfigDict(extra="forbid")

    schema_version: Literal[1] = SCHEMA_VERSION
    command: str
    scene: SceneFileDTO
    objective: ObjectiveDTO
    params: Dict[str, Any] = Field(default_factory=dict)
    iterations: List[IterationDTO] = Field(default_factory=list)
    terminal: str
    timings: Dict[str, float] = Field(default_factory=dict)
