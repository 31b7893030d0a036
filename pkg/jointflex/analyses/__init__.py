"""Analyses built on the flex stepper: objectives, tolerance search, cross beams, flocks."""
from jointflex.analyses.cross_beam import CrossBeamSuggestion, suggest_cross_beam
from jointflex.analyses.flock import (
    Camera,
    FlockSpec,
    check_flock_spec,
    cone_violation,
    flock_constraints,
    run_flock,
    x_spread,
)
from jointflex.analyses.objectives import (
    direction_objective,
    leader_x_objective,
    make_objective,
    radial_objective,
)
from jointflex.analyses.tolerance import (
    ToleranceQuery,
    ToleranceResult,
    inset_scene,
    tolerance_search,
)

__all__ = [
    "Camera",
    "CrossBeamSuggestion",
    "FlockSpec",
    "ToleranceQuery",
    "ToleranceResult",
    "check_flock_spec",
    "cone_violation",
    "direction_objective",
    "flock_constraints",
    "inset_scene",
    "leader_x_objective",
    "make_objective",
    "radial_objective",
    "run_flock",
    "suggest_cross_beam",
    "tolerance_search",
    "x_spread",
]
