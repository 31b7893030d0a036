"""Base adapter protocol for LP solver backends."""
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional

import numpy as np
from scipy import sparse


class LPStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True, eq=False)
class LinearProgram:
    """maximize ``c @ x`` subject to ``A @ x + b >= 0`` and ``lower <= x <= upper``.

    Infinite entries of ``lower``/``upper`` mean the side is unbounded.
    """

    c: np.ndarray
    A: sparse.csr_matrix
    b: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    @property
    def n_vars(self) -> int:
        return len(self.c)


@dataclass(frozen=True, eq=False)
class LPSolution:
    status: LPStatus
    x: Optional[np.ndarray] = None
    objective: Optional[float] = None
    message: str = ""


class SolverAdapter(ABC):
    """Abstract base class for LP solver adapters."""

    def __init__(self, **options):
        """Initialize adapter with backend-specific options."""
        self.options = options
        self.solver_name = self.__class__.__name__.replace("Adapter", "")

    @abstractmethod
    def solve(self, problem: LinearProgram) -> LPSolution:
        """Return an optimal vertex, or the infeasible/unbounded status.

        Raises:
            LPError: the backend failed for any other reason.
        """


class SolverRegistry:
    """Registry for LP solver adapters."""

    _adapters: Dict[str, tuple[type, dict]] = {}

    @classmethod
    def register(cls, name: str, adapter_class: type, **defaults):
        """Register a solver adapter under a name with default options."""
        cls._adapters[name] = (adapter_class, defaults)

    @classmethod
    def get_adapter(cls, name: str, **kwargs) -> SolverAdapter:
        """Get an instance of a solver adapter."""
        if name not in cls._adapters:
            raise ValueError(f"Unknown LP solver: {name}")
        adapter_class, defaults = cls._adapters[name]
        return adapter_class(**{**defaults, **kwargs})

    @classmethod
    def list_solvers(cls) -> List[str]:
        """List available solvers."""
        return list(cls._adapters.keys())
