"""
Conic solver adapter.

The engine only needs: load an LMI problem, solve it, read status and values.
cvxpy provides the modelling layer; the concrete solver comes from config with
ordered fallbacks.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import List, Optional

import cvxpy as cp

from src.utils.config_loader import get_config
from src.utils.logger import get_logger

logger = get_logger(__name__)
config = get_config()

OK_STATUSES = (cp.OPTIMAL, cp.OPTIMAL_INACCURATE)
INFEASIBLE_STATUSES = (cp.INFEASIBLE, cp.INFEASIBLE_INACCURATE)
UNBOUNDED_STATUSES = (cp.UNBOUNDED, cp.UNBOUNDED_INACCURATE)


@dataclass
class SolveOutcome:
    status: str
    solver: Optional[str]
    solve_time: float

    @property
    def ok(self) -> bool:
        return self.status in OK_STATUSES

    @property
    def infeasible(self) -> bool:
        return self.status in INFEASIBLE_STATUSES

    @property
    def unbounded(self) -> bool:
        return self.status in UNBOUNDED_STATUSES


class ConicBackend:
    """Solve cvxpy problems with a preferred solver and ordered fallbacks"""

    def __init__(self, name: Optional[str] = None, fallbacks: Optional[List[str]] = None,
                 verbose: Optional[bool] = None):
        solver_config = config.get_solver_config()
        self.name = (name or solver_config.get('name') or 'CLARABEL').upper()
        self.fallbacks = [s.upper() for s in (fallbacks if fallbacks is not None
                                              else solver_config.get('fallbacks', ['SCS']))]
        self.verbose = config.get_bool('solver.verbose', False) if verbose is None else verbose

    def candidates(self) -> List[str]:
        installed = set(cp.installed_solvers())
        ordered = []
        for solver in [self.name] + self.fallbacks:
            if solver in installed and solver not in ordered:
                ordered.append(solver)
        if not ordered:
            logger.warning(f"None of {[self.name] + self.fallbacks} installed; using cvxpy default")
            ordered.append(None)
        return ordered

    def solve(self, problem: cp.Problem) -> SolveOutcome:
        """
        Solve the problem, moving to the next solver on errors or undecided statuses

        Args:
            problem: cvxpy problem

        Returns:
            SolveOutcome of the last attempt
        """
        outcome = SolveOutcome(status="solver_error", solver=None, solve_time=0.0)
        for solver in self.candidates():
            start = time.perf_counter()
            try:
                problem.solve(solver=solver, verbose=self.verbose)
                status = problem.status
            except cp.error.SolverError as e:
                logger.warning(f"Solver {solver} failed: {e}")
                status = "solver_error"
            outcome = SolveOutcome(status=str(status), solver=solver,
                                   solve_time=time.perf_counter() - start)
            if outcome.ok or outcome.infeasible or outcome.unbounded:
                return outcome
            logger.debug(f"Solver {solver} returned status {status}; trying next")
        return outcome
