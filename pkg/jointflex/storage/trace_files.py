"""Trace documents: self-contained records of a flex run."""
from pathlib import Path
from typing import Optional, Union

import orjson
from pydantic import ValidationError

from jointflex.analyses.flock import FlockSpec, cone_violation
from jointflex.errors import SceneFormatError
from jointflex.geometry.scene import Pose
from jointflex.schemas.trace import IterationDTO, ObjectiveDTO, TraceFileDTO
from jointflex.stepper import StepParams, StepTrace, max_violation
from jointflex.storage.scene_files import dump_json, scene_from_dto, scene_to_dto, validation_error

PathLike = Union[str, Path]


def build_trace(
    trace: StepTrace,
    command: str,
    params: Optional[StepParams] = None,
    flock: Optional[FlockSpec] = None,
) -> TraceFileDTO:
    """Echo the inputs and every accepted iteration of ``trace``."""
    return TraceFileDTO(
        command=command,
        scene=scene_to_dto(trace.initial, flock),
        objective=ObjectiveDTO(
            weights=trace.objective.weights.tolist(), provenance=trace.objective.provenance
        ),
        params=(params or StepParams()).model_dump(),
        iterations=[
            IterationDTO(
                index=rec.index,
                lp_objective=rec.lp_objective,
                scale=rec.scale,
                gain=rec.gain,
                violation=rec.violation,
                n_rows=rec.n_rows,
                poses=[p.as_tuple() for p in rec.poses],
                timings=rec.timings,
            )
            for rec in trace.iterations
        ],
        terminal=trace.terminal.value,
        timings=trace.timings,
    )


def write_trace(path: PathLike, document: TraceFileDTO) -> None:
    Path(path).write_text(dump_json(document))


def read_trace(path: PathLike) -> TraceFileDTO:
    try:
        return TraceFileDTO.model_validate(orjson.loads(Path(path).read_bytes()))
    except orjson.JSONDecodeError as exc:
        raise SceneFormatError(f"malformed trace JSON: {exc}") from exc
    except ValidationError as exc:
        raise validation_error(exc) from exc


def replay_trace(document: TraceFileDTO) -> list[float]:
    """Recompute each iteration's violation from its recorded poses alone."""
    parsed = scene_from_dto(document.scene)
    extra = None
    if parsed.flock is not None and document.command == "flock":
        spec = parsed.flock
        extra = lambda scene: cone_violation(spec, scene)  # noqa: E731
    violations = []
    for record in document.iterations:
        scene = parsed.scene.with_poses([Pose(*p) for p in record.poses])
        violations.append(max_violation(scene, extra))
    return violations
