"""Linear programs through the HiGHS dual simplex."""

from __future__ import annotations

import dataclasses
import logging
import time
from typing import TYPE_CHECKING

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from omtepf.solvers.audit import audit
from omtepf.solvers.types import SolveResult, SolveStatus

if TYPE_CHECKING:
    from omtepf.assembler.problem import ProblemMatrices
    from omtepf.config import SolverOptions
    from omtepf.solvers.types import SolveRequest

logger = logging.getLogger(__name__)

_LINPROG_STATUS = {
    0: SolveStatus.OPTIMAL,
    1: SolveStatus.LIMIT,
    2: SolveStatus.INFEASIBLE,
    3: SolveStatus.UNBOUNDED,
    4: SolveStatus.LIMIT,
}


@dataclasses.dataclass(frozen=True, eq=False)
class LinearForm:
    """A linear program in linprog's A_ub/A_eq form.

    Two-sided rows are split into an upper and a negated lower row. Only the column
    bounds change between branch-and-bound nodes, so the form is built once.
    """

    c: np.ndarray
    offset: float
    a_ub: sparse.csr_matrix | None
    b_ub: np.ndarray | None
    a_eq: sparse.csr_matrix | None
    b_eq: np.ndarray | None
    upper_rows: np.ndarray
    lower_rows: np.ndarray

    @classmethod
    def from_problem(cls, problem: ProblemMatrices) -> LinearForm:
        upper_rows = np.flatnonzero(np.isfinite(problem.ineq_upper))
        lower_rows = np.flatnonzero(np.isfinite(problem.ineq_lower))
        a_ub = sparse.vstack(
            [problem.a_ineq[upper_rows], -problem.a_ineq[lower_rows]], format="csr"
        )
        b_ub = np.concatenate([problem.ineq_upper[upper_rows], -problem.ineq_lower[lower_rows]])
        has_ub = a_ub.shape[0] > 0
        has_eq = problem.a_eq.shape[0] > 0
        return cls(
            c=problem.c,
            offset=problem.offset,
            a_ub=a_ub if has_ub else None,
            b_ub=b_ub if has_ub else None,
            a_eq=problem.a_eq.tocsr() if has_eq else None,
            b_eq=problem.b_eq if has_eq else None,
            upper_rows=upper_rows,
            lower_rows=lower_rows,
        )


@dataclasses.dataclass(frozen=True, eq=False)
class Relaxation:
    status: SolveStatus
    x: np.ndarray | None
    objective: float
    message: str
    duals: dict[str, np.ndarray] | None = None


def solve_relaxation(
    form: LinearForm,
    lower: np.ndarray,
    upper: np.ndarray,
    options: SolverOptions,
    time_limit: float | None = None,
) -> Relaxation:
    """Solves the linear program of `form` under the given column bounds."""
    bounds = np.column_stack([lower, upper])
    res = linprog(
        form.c,
        A_ub=form.a_ub,
        b_ub=form.b_ub,
        A_eq=form.a_eq,
        b_eq=form.b_eq,
        bounds=bounds,
        method="highs-ds",
        options={
            "primal_feasibility_tolerance": options.lp_tol,
            "dual_feasibility_tolerance": options.lp_tol,
            "time_limit": options.time_limit if time_limit is None else max(time_limit, 1e-3),
        },
    )
    status = _LINPROG_STATUS.get(res.status, SolveStatus.LIMIT)
    if status is not SolveStatus.OPTIMAL or res.x is None:
        return Relaxation(status, None, np.nan, res.message)

    duals = {}
    if form.a_eq is not None and getattr(res, "eqlin", None) is not None:
        duals["eq"] = np.asarray(res.eqlin.marginals)
    if form.a_ub is not None and getattr(res, "ineqlin", None) is not None:
        marginals = np.asarray(res.ineqlin.marginals)
        split = len(form.upper_rows)
        duals["ineq_upper"] = marginals[:split]
        duals["ineq_lower"] = marginals[split:]
    return Relaxation(status, res.x, float(res.fun) + form.offset, res.message, duals)


def solve_lp(request: SolveRequest) -> SolveResult:
    """Solves a linear program.

    Args:
        request: A request without binary columns and without quadratic parts.

    Raises:
        ValueError: The program has binary columns or nonlinear parts.

    Returns:
        An optimal basic solution, or the failure status. An optimal solution that
        fails the residual audit is reported with status limit.
    """
    problem = request.problem
    if problem.has_binaries:
        raise ValueError("solve_lp requires a program without binary columns")
    if not problem.is_linear:
        raise ValueError("solve_lp requires a linear program")

    start = time.perf_counter()
    relaxation = solve_relaxation(
        LinearForm.from_problem(problem), problem.lower, problem.upper, request.options
    )
    elapsed = time.perf_counter() - start
    logger.info("LP solved: %s in %.3fs", relaxation.status.value, elapsed)
    if relaxation.x is None:
        return SolveResult.failed(relaxation.status, relaxation.message, elapsed)

    report = audit(problem, relaxation.x, request.options.feasibility_tol)
    status = SolveStatus.OPTIMAL if report.ok else SolveStatus.LIMIT
    return SolveResult(
        status=status,
        x=relaxation.x,
        objective=problem.objective(relaxation.x),
        residuals=report.residuals,
        wall_time=elapsed,
        message=relaxation.message if report.ok else str(report),
        duals=relaxation.duals,
    )
