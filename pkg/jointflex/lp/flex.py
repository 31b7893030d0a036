"""Flex and separation linear programs over the constraint polyhedron."""
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import sparse

from jointflex.adapters import LinearProgram, LPStatus, SolverRegistry
from jointflex.app_logging import get_logger
from jointflex.config import settings
from jointflex.constraints.system import DistanceSystem, assemble
from jointflex.errors import InvalidObjectiveError
from jointflex.geometry.scene import Scene

logger = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class Objective:
    """LP weights over the free DOFs and how they were produced."""

    weights: np.ndarray
    provenance: str = "direct"

    def __post_init__(self) -> None:
        weights = np.array(self.weights, dtype=float)
        if weights.ndim != 1 or not np.all(np.isfinite(weights)):
            raise InvalidObjectiveError("objective weights must be a finite vector")
        if not np.any(weights):
            raise InvalidObjectiveError("objective weights are all zero")
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)

    def __len__(self) -> int:
        return len(self.weights)

    def check_size(self, n_dof: int) -> None:
        if len(self.weights) != n_dof:
            raise InvalidObjectiveError(
                f"objective has {len(self.weights)} weights, system has {n_dof} DOFs"
            )


@dataclass(frozen=True, eq=False)
class Displacement:
    """Stacked (dx, dy, dtheta) per free body, with the time step scaled to 1."""

    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        if not np.all(np.isfinite(values)):
            raise ValueError("displacement must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, n_dof: int) -> "Displacement":
        return cls(np.zeros(n_dof))

    def __len__(self) -> int:
        return len(self.values)

    def per_body(self) -> np.ndarray:
        return self.values.reshape(-1, 3)

    def norm(self) -> float:
        return float(np.linalg.norm(self.values))

    def scaled(self, s: float) -> "Displacement":
        return Displacement(s * self.values)


@dataclass(frozen=True, eq=False)
class DisplacementBounds:
    """Per-DOF box ``lower <= dq <= upper``; infinite entries are open."""

    lower: np.ndarray
    upper: np.ndarray

    @classmethod
    def uniform(
        cls, column_kinds: tuple[str, ...], translation: float, rotation: float
    ) -> "DisplacementBounds":
        upper = np.array([rotation if k == "theta" else translation for k in column_kinds])
        return cls(-upper, upper)

    @classmethod
    def unbounded(cls, n_dof: int) -> "DisplacementBounds":
        return cls(np.full(n_dof, -np.inf), np.full(n_dof, np.inf))

    def shrunk(self, factor: float) -> "DisplacementBounds":
        return DisplacementBounds(self.lower * factor, self.upper * factor)

    def max_scale(self, dq: np.ndarray) -> float:
        """Largest ``s`` with ``s * dq`` inside the box."""
        with np.errstate(divide="ignore", invalid="ignore"):
            up = np.where(dq > 0, self.upper / dq, np.inf)
            down = np.where(dq < 0, self.lower / dq, np.inf)
        return float(min(up.min(initial=np.inf), down.min(initial=np.inf)))


def default_bounds(scene: Scene, column_kinds: Optional[tuple[str, ...]] = None) -> DisplacementBounds:
    """Scene-declared limits, else ±(factor·ε) per translation and ±ROTATION_BOUND per rotation."""
    kinds = column_kinds or ("x", "y", "theta") * scene.n_free
    if scene.bounds is not None:
        return DisplacementBounds.uniform(kinds, scene.bounds.translation, scene.bounds.rotation)
    return DisplacementBounds.uniform(
        kinds, settings.TRANSLATION_BOUND_FACTOR * scene.epsilon, settings.ROTATION_BOUND
    )


@dataclass(frozen=True, eq=False)
class LPResult:
    status: LPStatus
    displacement: Optional[Displacement] = None
    objective_value: Optional[float] = None
    message: str = ""

    @property
    def optimal(self) -> bool:
        return self.status is LPStatus.OPTIMAL


def _solve(system: DistanceSystem, c: np.ndarray, bounds: DisplacementBounds, solver: Optional[str]) -> LPResult:
    adapter = SolverRegistry.get_adapter(solver or settings.LP_SOLVER)
    problem = LinearProgram(
        c=c, A=system.jacobian, b=system.d0, lower=bounds.lower, upper=bounds.upper
    )
    solution = adapter.solve(problem)
    if solution.status is not LPStatus.OPTIMAL:
        return LPResult(status=solution.status, message=solution.message)

    residual = system.residuals(solution.x)
    worst = float(residual.min()) if residual.size else 0.0
    if worst < -settings.LP_FEASIBILITY_TOLERANCE:
        logger.warning(f"LP solution violates a row by {-worst:.3g}")
    return LPResult(
        status=LPStatus.OPTIMAL,
        displacement=Displacement(solution.x),
        objective_value=solution.objective,
        message=solution.message,
    )


def solve_flex(
    system: DistanceSystem,
    objective: Objective,
    bounds: DisplacementBounds,
    solver: Optional[str] = None,
) -> LPResult:
    """Maximize ``c @ dq`` subject to ``J dq + d0 >= 0`` and the box bounds.

    Any optimal vertex is acceptable.
    """
    objective.check_size(system.n_dof)
    result = _solve(system, objective.weights, bounds, solver)
    logger.debug(f"Flex LP {result.status.value}, objective {result.objective_value}")
    return result


def separation_rows(column_kinds: tuple[str, ...], k: float, sign: int) -> tuple[sparse.csr_matrix, np.ndarray]:
    """Rows bounding the signed translation sum to ``[k, 2k]``."""
    translation = np.array([0.0 if kind == "theta" else 1.0 for kind in column_kinds])
    rows = np.vstack([sign * translation, -sign * translation])
    return sparse.csr_matrix(rows), np.array([-k, 2.0 * k])


def solve_separation(
    system: DistanceSystem,
    k: Optional[float] = None,
    sign: int = 1,
    objective: Optional[Objective] = None,
    rotation_bound: Optional[float] = None,
    solver: Optional[str] = None,
) -> LPResult:
    """Flex LP plus rows forcing ``k <= sign * sum(dx_i + dy_i) <= 2k``.

    Translations are unbounded; rotations stay within ``rotation_bound``.
    Infeasible means no separating motion with a translation sum of that sign.
    """
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    k_value = settings.SEPARATION_K if k is None else k
    kinds = system.column_kinds or ("x", "y", "theta") * (system.n_dof // 3)
    rows, d0 = separation_rows(kinds, k_value, sign)
    augmented = DistanceSystem(
        pairs=system.pairs,
        d0=np.concatenate([system.d0, d0]),
        jacobian=sparse.vstack([system.jacobian, rows], format="csr"),
        labels=system.labels + ("separation-min", "separation-max"),
        column_kinds=system.column_kinds,
        column_bodies=system.column_bodies,
    )
    rot = settings.ROTATION_BOUND if rotation_bound is None else rotation_bound
    upper = np.array([rot if kind == "theta" else np.inf for kind in kinds])
    bounds = DisplacementBounds(-upper, upper)
    weights = objective.weights if objective is not None else np.ones(system.n_dof)
    return _solve(augmented, weights, bounds, solver)


@dataclass(frozen=True, eq=False)
class SeparabilityVerdict:
    separable: bool
    sign: Optional[int] = None
    displacement: Optional[Displacement] = None
    caveat: str = ""

    @property
    def direction(self) -> Optional[np.ndarray]:
        if self.displacement is None:
            return None
        return self.displacement.values / self.displacement.norm()


ZERO_SUM_CAVEAT = (
    "separating motions whose translation components sum to exactly zero "
    "are not detected"
)


def classify_separability(
    scene: Scene, k: Optional[float] = None, solver: Optional[str] = None
) -> SeparabilityVerdict:
    """Try the separation LP with a positive, then a negative translation sum."""
    system = assemble(scene)
    for sign in (1, -1):
        result = solve_separation(system, k=k, sign=sign, solver=solver)
        if result.optimal:
            logger.info(f"Scene separable with translation-sum sign {sign:+d}")
            return SeparabilityVerdict(True, sign, result.displacement, ZERO_SUM_CAVEAT)
    logger.info("Scene inseparable under the linear model")
    return SeparabilityVerdict(False, caveat=ZERO_SUM_CAVEAT)
