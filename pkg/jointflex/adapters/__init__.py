"""LP solver adapters; importing this package registers the built-in backends."""
from jointflex.adapters.base import (
    LinearProgram,
    LPSolution,
    LPStatus,
    SolverAdapter,
    SolverRegistry,
)
from jointflex.adapters.highs_adapter import HighsAdapter

SolverRegistry.register("highs", HighsAdapter, method="highs")
SolverRegistry.register("highs-ds", HighsAdapter, method="highs-ds")
SolverRegistry.register("highs-ipm", HighsAdapter, method="highs-ipm")

__all__ = [
    "HighsAdapter",
    "LPSolution",
    "LPStatus",
    "LinearProgram",
    "SolverAdapter",
    "SolverRegistry",
]
