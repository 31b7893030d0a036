"""Flex and separation linear programs."""
from jointflex.adapters.base import LPStatus
from jointflex.lp.flex import (
    Displacement,
    DisplacementBounds,
    LPResult,
    Objective,
    SeparabilityVerdict,
    classify_separability,
    default_bounds,
    solve_flex,
    solve_separation,
)

__all__ = [
    "Displacement",
    "DisplacementBounds",
    "LPResult",
    "LPStatus",
    "Objective",
    "SeparabilityVerdict",
    "classify_separability",
    "default_bounds",
    "solve_flex",
    "solve_separation",
]
