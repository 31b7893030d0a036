"""Time stepping: turn LP directions into collision-free configuration updates."""
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional

import numpy as np
from pydantic import BaseModel, Field, field_validator

from jointflex.app_logging import get_logger
from jointflex.config import settings
from jointflex.constraints.rows import pair_terms
from jointflex.constraints.selection import select_pairs
from jointflex.constraints.system import AuxiliaryRows, assemble
from jointflex.errors import (
    InfeasibleLPError,
    InitialPenetrationError,
    StallError,
    UnboundedLPError,
)
from jointflex.geometry.overlap import overlap_depth
from jointflex.geometry.scene import Pose, Scene
from jointflex.lp.flex import (
    Displacement,
    DisplacementBounds,
    LPResult,
    LPStatus,
    Objective,
    default_bounds,
    solve_flex,
)

logger = get_logger(__name__)

RowHook = Callable[[Scene], AuxiliaryRows]
ViolationHook = Callable[[Scene], float]
ObjectiveHook = Callable[[Scene], Optional[Objective]]


class StepParams(BaseModel):
    """Tunables of the solve-step-reassemble loop."""

    eta: float = Field(default_factory=lambda: settings.STEP_ETA, gt=0)
    scales: List[float] = Field(default_factory=lambda: list(settings.STEP_SCALES))
    max_iters: int = Field(default_factory=lambda: settings.MAX_ITERS, ge=1)
    convergence_factor: float = Field(
        default_factory=lambda: settings.CONVERGENCE_FACTOR, gt=0
    )
    bound_shrink_attempts: int = Field(
        default_factory=lambda: settings.BOUND_SHRINK_ATTEMPTS, ge=0
    )
    corner_mode: Optional[str] = None
    solver: Optional[str] = None

    @field_validator("scales")
    @classmethod
    def validate_scales(cls, v: List[float]) -> List[float]:
        if not v:
            raise ValueError("scale grid must not be empty")
        if any(s <= 0 for s in v):
            raise ValueError("scale multipliers must be positive")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("scale multipliers must be strictly increasing")
        return v

    @field_validator("corner_mode")
    @classmethod
    def validate_corner_mode(cls, v: Optional[str]) -> Optional[str]:
        if v is not None and v not in ("averaged", "plain"):
            raise ValueError(f"corner_mode must be 'averaged' or 'plain', got {v!r}")
        return v


class TerminalReason(str, Enum):
    CONVERGED = "converged"
    MAX_ITERS = "max_iters"
    LP_UNBOUNDED = "lp_unbounded"
    LP_INFEASIBLE = "lp_infeasible"
    STALLED = "stalled"


@dataclass(frozen=True)
class IterationRecord:
    index: int
    lp_objective: float
    scale: float
    gain: float
    violation: float
    poses: tuple[Pose, ...]
    n_rows: int
    timings: dict = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class StepTrace:
    initial: Scene
    final: Scene
    objective: Objective
    iterations: tuple[IterationRecord, ...]
    terminal: TerminalReason
    timings: dict = field(default_factory=dict)

    @property
    def n_iterations(self) -> int:
        return len(self.iterations)

    @property
    def cumulative_objective(self) -> np.ndarray:
        return np.cumsum([rec.gain for rec in self.iterations])

    @property
    def total_displacement(self) -> np.ndarray:
        """Final minus initial pose of every free body, stacked like the LP columns."""
        rows = [
            np.subtract(self.final.bodies[i].pose.as_tuple(), self.initial.bodies[i].pose.as_tuple())
            for i in self.initial.free_indices
        ]
        return np.concatenate(rows) if rows else np.zeros(0)

    def raise_for_terminal(self) -> None:
        """Raise the analysis error matching a failed run; no-op otherwise."""
        if self.terminal is TerminalReason.LP_UNBOUNDED:
            raise UnboundedLPError(
                f"flex LP unbounded after {self.n_iterations} iterations; supply displacement bounds"
            )
        if self.terminal is TerminalReason.LP_INFEASIBLE:
            raise InfeasibleLPError(f"flex LP infeasible after {self.n_iterations} iterations")
        if self.terminal is TerminalReason.STALLED:
            raise StallError(
                f"no step within the violation tolerance after {self.n_iterations} iterations"
            )


def apply_displacement(scene: Scene, dq: Displacement, s: float) -> Scene:
    """Euler update ``q + s * dq`` of every free body; fixed bodies stay put."""
    if s < 0:
        raise ValueError(f"scale must be non-negative, got {s}")
    if len(dq) != scene.n_dof:
        raise ValueError(f"displacement has {len(dq)} entries, scene has {scene.n_dof} DOFs")
    if s == 0:
        return scene
    steps = dq.per_body()
    poses = list(scene.poses)
    for row, body_index in enumerate(scene.free_indices):
        dx, dy, dtheta = s * steps[row]
        poses[body_index] = poses[body_index].moved(dx, dy, dtheta)
    return scene.with_poses(poses)


def pair_violation(
    scene: Scene,
    penetration_tolerance: Optional[float] = None,
    corner_mode: Optional[str] = None,
) -> float:
    """``max(0, -min d)`` over constraint pairs selected afresh at ``scene``.

    A vertex found deep inside another body counts with its depth.
    """
    tol = (
        settings.STEP_ETA + settings.PENETRATION_TOLERANCE
        if penetration_tolerance is None
        else penetration_tolerance
    )
    try:
        pairs = select_pairs(scene, penetration_tolerance=tol, corner_mode=corner_mode)
    except InitialPenetrationError as exc:
        return exc.depth
    distances = pair_terms(scene, pairs).distance
    return max(0.0, -float(distances.min())) if distances.size else 0.0


def max_violation(
    scene: Scene,
    extra_violation: Optional[ViolationHook] = None,
    penetration_tolerance: Optional[float] = None,
    corner_mode: Optional[str] = None,
) -> float:
    """Worst of the exact polygon overlap, the fresh pair distances and any extra hook.

    The exact overlap catches contacts created by a large step even when no
    constraint pair covered them.
    """
    violation = max(
        overlap_depth(scene), pair_violation(scene, penetration_tolerance, corner_mode)
    )
    if extra_violation is not None:
        violation = max(violation, extra_violation(scene))
    return violation


@dataclass(frozen=True, eq=False)
class _Trial:
    scale: float
    scene: Scene
    violation: float


def _search(
    scene: Scene,
    dq: Displacement,
    params: StepParams,
    bounds: Optional[DisplacementBounds],
    extra_violation: Optional[ViolationHook],
) -> _Trial:
    cap = bounds.max_scale(dq.values) if bounds is not None else np.inf
    tol = params.eta + settings.PENETRATION_TOLERANCE

    def measure(candidate: Scene) -> float:
        return max_violation(candidate, extra_violation, tol, params.corner_mode)

    for s in sorted(params.scales, reverse=True):
        if s > cap * (1.0 + 1e-12):
            continue
        trial = apply_displacement(scene, dq, s)
        violation = measure(trial)
        if violation <= params.eta:
            return _Trial(s, trial, violation)
    return _Trial(0.0, scene, measure(scene))


def line_search(
    scene: Scene,
    dq: Displacement,
    params: Optional[StepParams] = None,
    bounds: Optional[DisplacementBounds] = None,
    extra_violation: Optional[ViolationHook] = None,
) -> float:
    """Largest grid multiplier whose step keeps the violation within ``eta``.

    Multipliers that would leave the trust-region ``bounds`` are skipped.
    Returns 0 when even the smallest multiplier violates.
    """
    return _search(scene, dq, params or StepParams(), bounds, extra_violation).scale


def flex_iterate(
    scene: Scene,
    objective: Objective,
    params: Optional[StepParams] = None,
    bounds: Optional[DisplacementBounds] = None,
    extra_rows: Optional[RowHook] = None,
    extra_violation: Optional[ViolationHook] = None,
    objective_hook: Optional[ObjectiveHook] = None,
) -> StepTrace:
    """Repeat assemble -> solve -> line search -> apply until the gain vanishes.

    Constraints are re-selected at every configuration, with rows whose
    distance is slightly negative kept so the next LP can step back.
    ``objective_hook`` rebuilds the objective from the current scene before
    each solve; returning None ends the run as converged.
    """
    params = params or StepParams()
    box = bounds or default_bounds(scene)
    tolerance = params.convergence_factor * scene.diameter
    started = time.perf_counter()

    current = scene
    records: list[IterationRecord] = []
    terminal = TerminalReason.MAX_ITERS
    for index in range(1, params.max_iters + 1):
        if objective_hook is not None:
            step_objective = objective_hook(current)
            if step_objective is None:
                terminal = TerminalReason.CONVERGED
                break
        else:
            step_objective = objective

        t0 = time.perf_counter()
        system = assemble(
            current,
            penetration_tolerance=params.eta + settings.PENETRATION_TOLERANCE,
            corner_mode=params.corner_mode,
        )
        if extra_rows is not None:
            system = system.with_rows(extra_rows(current))
        t1 = time.perf_counter()

        step_box = box
        result: LPResult = LPResult(status=LPStatus.INFEASIBLE)
        accepted: Optional[_Trial] = None
        solve_time = 0.0
        for _ in range(params.bound_shrink_attempts + 1):
            ts = time.perf_counter()
            result = solve_flex(system, step_objective, step_box, solver=params.solver)
            solve_time += time.perf_counter() - ts
            if not result.optimal:
                break
            accepted = _search(current, result.displacement, params, step_box, extra_violation)
            if accepted.scale > 0:
                break
            step_box = step_box.shrunk(0.5)
            logger.info("Step stalled; shrinking bounds", extra={"iteration": index})
        t2 = time.perf_counter()

        if result.status is LPStatus.UNBOUNDED:
            terminal = TerminalReason.LP_UNBOUNDED
            break
        if result.status is LPStatus.INFEASIBLE:
            terminal = TerminalReason.LP_INFEASIBLE
            break
        if accepted is None or accepted.scale == 0.0:
            terminal = TerminalReason.STALLED
            break

        gain = float(step_objective.weights @ result.displacement.values) * accepted.scale
        records.append(
            IterationRecord(
                index=index,
                lp_objective=float(result.objective_value),
                scale=accepted.scale,
                gain=gain,
                violation=accepted.violation,
                poses=accepted.scene.poses,
                n_rows=system.n_rows,
                timings={
                    "assemble": t1 - t0,
                    "solve": solve_time,
                    "line_search": (t2 - t1) - solve_time,
                },
            )
        )
        current = accepted.scene
        logger.info(
            f"Iteration {index}: objective {result.objective_value:.6g}, "
            f"scale {accepted.scale:g}, gain {gain:.3g}, violation {accepted.violation:.3g}",
            extra={"iteration": index},
        )
        if gain < tolerance:
            terminal = TerminalReason.CONVERGED
            break

    timings = {
        "assemble": sum(r.timings["assemble"] for r in records),
        "solve": sum(r.timings["solve"] for r in records),
        "line_search": sum(r.timings["line_search"] for r in records),
        "total": time.perf_counter() - started,
    }
    logger.info(f"Flex finished after {len(records)} iterations: {terminal.value}")
    return StepTrace(
        initial=scene,
        final=current,
        objective=objective,
        iterations=tuple(records),
        terminal=terminal,
        timings=timings,
    )
