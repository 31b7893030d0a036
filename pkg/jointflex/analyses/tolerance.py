"""Bisection for the loosest joint tolerance whose flex stays acceptable."""
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np
from pydantic import BaseModel, Field, field_validator

from jointflex.app_logging import get_logger
from jointflex.errors import InvalidObjectiveError
from jointflex.geometry.polygon import inset_polygon
from jointflex.geometry.scene import Body, Scene
from jointflex.lp.flex import Objective
from jointflex.stepper import StepParams, StepTrace, TerminalReason, flex_iterate

logger = get_logger(__name__)

# Metric drops smaller than this between increasing samples are noise.
MONOTONE_SLACK = 1e-9


class ToleranceQuery(BaseModel):
    t_max: float = Field(gt=0)
    threshold: float = Field(gt=0)
    track_body: int = Field(ge=0)
    track_point: tuple[float, float] = (0.0, 0.0)
    objective: Any
    bisection_tolerance: float = Field(default=1e-4, gt=0)
    step_params: StepParams = Field(default_factory=StepParams)

    @field_validator("objective")
    @classmethod
    def validate_objective(cls, v: Any) -> Objective:
        if not isinstance(v, Objective):
            raise ValueError("objective must be an Objective")
        return v


@dataclass(frozen=True)
class ToleranceResult:
    t_star: float
    samples: tuple[tuple[float, float], ...]
    monotone: bool


def inset_scene(scene: Scene, t: float) -> Scene:
    """Inset every free body's polygon by ``t``; fixed bodies are left alone."""
    if t == 0:
        return scene
    bodies = [
        b if b.fixed else Body(inset_polygon(b.polygon, t), b.pose, b.fixed, b.name)
        for b in scene.bodies
    ]
    return scene.with_bodies(bodies)


def flex_metric(trace: StepTrace, query: ToleranceQuery) -> float:
    """Tracked point displacement along the objective's direction for the tracked body.

    Falls back to the displacement magnitude when the objective does not
    weight that body's translation.
    """
    before = trace.initial.bodies[query.track_body].local_to_world(query.track_point)
    after = trace.final.bodies[query.track_body].local_to_world(query.track_point)
    moved = after - before
    col = trace.initial.column_of(query.track_body)
    if col is not None:
        direction = np.asarray(query.objective.weights[col : col + 2])
        length = float(np.hypot(*direction))
        if length > 0:
            return float(moved @ direction) / length
    return float(np.hypot(*moved))


def _evaluate_at(scene: Scene, query: ToleranceQuery, t: float) -> float:
    trace = flex_iterate(inset_scene(scene, t), query.objective, query.step_params)
    if trace.terminal is TerminalReason.LP_UNBOUNDED:
        trace.raise_for_terminal()
    metric = flex_metric(trace, query)
    logger.info(f"Inset {t:.6g}: metric {metric:.6g} ({trace.terminal.value})")
    return metric


def tolerance_search(scene: Scene, query: ToleranceQuery) -> ToleranceResult:
    """Largest inset ``t`` in ``[0, t_max]`` whose flex metric stays within the threshold.

    Assumes the metric grows with ``t``; a decrease between samples is logged
    and reported as ``monotone=False``.

    Raises:
        InsetCollapseError: a sample insets a polygon past collapse.
        UnboundedLPError: a sample's LP is unbounded.
    """
    samples: dict[float, float] = {}

    def metric(t: float) -> float:
        if t not in samples:
            samples[t] = _evaluate_at(scene, query, t)
        return samples[t]

    def result(t_star: float) -> ToleranceResult:
        ordered = tuple(sorted(samples.items()))
        values = [m for _, m in ordered]
        monotone = all(b >= a - MONOTONE_SLACK for a, b in zip(values, values[1:]))
        if not monotone:
            logger.warning("Flex metric is not monotone in the inset depth")
        return ToleranceResult(t_star, ordered, monotone)

    if metric(0.0) > query.threshold:
        return result(0.0)
    if metric(query.t_max) <= query.threshold:
        return result(query.t_max)

    lo, hi = 0.0, query.t_max
    while hi - lo > query.bisection_tolerance:
        mid = 0.5 * (lo + hi)
        if metric(mid) <= query.threshold:
            lo = mid
        else:
            hi = mid
    return result(lo)


def resolve_track_body(scene: Scene, name: Optional[str]) -> int:
    """Body index for a tracked-body name, defaulting to the first free body.

    Raises:
        KeyError: no body has that name.
        InvalidObjectiveError: no name given and every body is fixed.
    """
    if name is None:
        if not scene.free_indices:
            raise InvalidObjectiveError("scene has no free body to track")
        return scene.free_indices[0]
    return scene.body_index(name)
