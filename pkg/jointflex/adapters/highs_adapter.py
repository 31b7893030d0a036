"""HiGHS solvers through scipy.optimize.linprog."""
import numpy as np
from scipy.optimize import linprog

from jointflex.adapters.base import LinearProgram, LPSolution, LPStatus, SolverAdapter
from jointflex.app_logging import get_logger
from jointflex.errors import LPError

logger = get_logger(__name__)

_STATUS = {0: LPStatus.OPTIMAL, 2: LPStatus.INFEASIBLE, 3: LPStatus.UNBOUNDED}

# linprog status for HiGHS's "unbounded or infeasible" presolve verdict
_AMBIGUOUS = 4


class HighsAdapter(SolverAdapter):
    """Sparse LP via HiGHS (dual simplex, interior point or automatic choice)."""

    def __init__(self, method: str = "highs", **options):
        super().__init__(**options)
        self.method = method

    def _linprog(self, problem: LinearProgram, c: np.ndarray):
        bounds = [
            (None if np.isinf(lo) else float(lo), None if np.isinf(hi) else float(hi))
            for lo, hi in zip(problem.lower, problem.upper)
        ]
        has_rows = problem.A.shape[0] > 0
        return linprog(
            -c,
            A_ub=-problem.A if has_rows else None,
            b_ub=problem.b if has_rows else None,
            bounds=bounds,
            method=self.method,
            options=self.options or None,
        )

    def solve(self, problem: LinearProgram) -> LPSolution:
        result = self._linprog(problem, problem.c)
        if result.status == _AMBIGUOUS and "infeasible" in str(result.message).lower():
            # A zero objective separates the two cases.
            feasible = self._linprog(problem, np.zeros_like(problem.c)).status == 0
            status = LPStatus.UNBOUNDED if feasible else LPStatus.INFEASIBLE
        else:
            status = _STATUS.get(result.status)
        if status is None:
            raise LPError(f"{self.method} failed with status {result.status}: {result.message}")
        if status is not LPStatus.OPTIMAL:
            logger.info(f"LP {status.value}: {result.message}")
            return LPSolution(status=status, message=result.message)
        x = np.asarray(result.x, dtype=float)
        return LPSolution(
            status=status, x=x, objective=float(problem.c @ x), message=result.message
        )
