"""Depth-first branch-and-bound over binary columns."""

from __future__ import annotations

import concurrent.futures
import dataclasses
import logging
import time
from typing import TYPE_CHECKING, Callable

import numpy as np

from omtepf.exceptions import InfeasibleBoundaryError
from omtepf.solvers.audit import audit
from omtepf.solvers.interior_point import solve_convex, solve_convex_problem
from omtepf.solvers.lp import LinearForm, solve_lp, solve_relaxation
from omtepf.solvers.types import SolveRequest, SolveResult, SolveStatus
from omtepf.transformers.integrality import BinaryFixer
from omtepf.transformers.presolve import FixedColumnEliminator, SingletonRowReducer

if TYPE_CHECKING:
    from omtepf.assembler.problem import ProblemMatrices
    from omtepf.config import SolverOptions

logger = logging.getLogger(__name__)

LOG_EVERY = 1000


@dataclasses.dataclass(frozen=True, eq=False)
class _Node:
    lower: np.ndarray
    upper: np.ndarray
    bound: float
    depth: int
    hint: np.ndarray | None = None


@dataclasses.dataclass(frozen=True, eq=False)
class _NodeOutcome:
    status: SolveStatus
    x: np.ndarray | None
    objective: float


Relax = Callable[[_Node, float], _NodeOutcome]


def _linear_relaxation(problem: ProblemMatrices, options: SolverOptions) -> Relax:
    form = LinearForm.from_problem(problem)

    def relax(node: _Node, remaining: float) -> _NodeOutcome:
        res = solve_relaxation(form, node.lower, node.upper, options, time_limit=remaining)
        return _NodeOutcome(res.status, res.x, res.objective)

    return relax


def _convex_relaxation(problem: ProblemMatrices, options: SolverOptions) -> Relax:
    continuous = problem.replace(binary=np.zeros_like(problem.binary))

    def relax(node: _Node, remaining: float) -> _NodeOutcome:
        del remaining
        res = solve_convex_problem(
            continuous.replace(lower=node.lower, upper=node.upper), options, node.hint
        )
        x = res.x if res.status is SolveStatus.OPTIMAL else None
        return _NodeOutcome(res.status, x, res.objective)

    return relax


class _Search:
    """State of one branch-and-bound run in the presolved column space."""

    def __init__(self, problem: ProblemMatrices, options: SolverOptions, relax: Relax) -> None:
        self.problem = problem
        self.options = options
        self.relax = relax
        self.binary = np.flatnonzero(problem.binary)
        self.rng = np.random.default_rng(options.seed)
        self.incumbent: np.ndarray | None = None
        self.incumbent_value = np.inf
        self.trace: list[float] = []
        self.nodes = 0
        self.complete = True
        self.root_status: SolveStatus | None = None

    def offer(self, x: np.ndarray, value: float) -> None:
        """Replaces the incumbent if `value` improves on it."""
        if value < self.incumbent_value:
            self.incumbent = x
            self.incumbent_value = value
            self.trace.append(value)
            logger.info("Node %d: new incumbent %.10g", self.nodes, value)

    def pruned(self, bound: float) -> bool:
        if self.incumbent is None:
            return False
        slack = self.options.relative_gap * max(1.0, abs(self.incumbent_value))
        return bound >= self.incumbent_value - slack

    def branching_column(self, x: np.ndarray) -> int | None:
        values = x[self.binary]
        frac = np.abs(values - np.round(values))
        worst = frac.max(initial=0.0)
        if worst <= self.options.integrality_tol:
            return None
        # Distance to 0.5 ranks the most fractional column first.
        score = 0.5 - np.abs(values - np.floor(values) - 0.5)
        candidates = np.flatnonzero(score >= score.max() - 1e-12)
        if self.options.tie_break == "random":
            return int(self.binary[self.rng.choice(candidates)])
        return int(self.binary[candidates[0]])

    def children(self, node: _Node, outcome: _NodeOutcome, col: int) -> tuple[_Node, _Node]:
        down_upper = node.upper.copy()
        down_upper[col] = np.floor(outcome.x[col])
        up_lower = node.lower.copy()
        up_lower[col] = np.ceil(outcome.x[col])
        down = _Node(node.lower, down_upper, outcome.objective, node.depth + 1, outcome.x)
        up = _Node(up_lower, node.upper, outcome.objective, node.depth + 1, outcome.x)
        return down, up

    def process(self, node: _Node, outcome: _NodeOutcome, stack: list[_Node]) -> None:
        if self.root_status is None:
            self.root_status = outcome.status
        if outcome.status is SolveStatus.INFEASIBLE:
            return
        if outcome.status is not SolveStatus.OPTIMAL or outcome.x is None:
            self.complete = False
            return
        if self.pruned(outcome.objective):
            return
        col = self.branching_column(outcome.x)
        if col is None:
            x = outcome.x.copy()
            x[self.binary] = np.round(x[self.binary])
            self.offer(x, outcome.objective)
            return
        down, up = self.children(node, outcome, col)
        # Down child on top of the stack runs first.
        stack.extend([up, down])

    def run(self, deadline: float) -> None:
        root = _Node(self.problem.lower, self.problem.upper, -np.inf, 0)
        stack = [root]
        pool = None
        if self.options.threads > 1:
            pool = concurrent.futures.ThreadPoolExecutor(max_workers=self.options.threads)
        try:
            while stack:
                if self.nodes >= self.options.node_limit or time.perf_counter() >= deadline:
                    self.complete = False
                    logger.info("Search stopped at %d nodes with %d open", self.nodes, len(stack))
                    return
                batch_size = 1 if pool is None or self.nodes == 0 else self.options.threads
                batch = []
                while stack and len(batch) < batch_size:
                    node = stack.pop()
                    if not self.pruned(node.bound):
                        batch.append(node)
                if not batch:
                    continue
                remaining = max(deadline - time.perf_counter(), 1e-3)
                if pool is None:
                    outcomes = [self.relax(node, remaining) for node in batch]
                else:
                    outcomes = list(pool.map(lambda nd: self.relax(nd, remaining), batch))
                # Incumbent updates stay in batch order.
                for node, outcome in zip(batch, outcomes):
                    self.nodes += 1
                    self.process(node, outcome, stack)
                if self.nodes % LOG_EVERY < len(batch):
                    logger.info(
                        "Nodes %d, open %d, incumbent %.10g",
                        self.nodes,
                        len(stack),
                        self.incumbent_value,
                    )
        finally:
            if pool is not None:
                pool.shutdown()


def _warm_incumbent(
    request: SolveRequest,
    continuous_solve: Callable[[SolveRequest], SolveResult],
) -> SolveResult | None:
    """Solves the program with the binaries of the warm start fixed."""
    try:
        fixed = BinaryFixer(request.warm_start).transform(request.problem)
    except InfeasibleBoundaryError as e:
        logger.info("Warm start rejected: %s", e)
        return None
    result = continuous_solve(SolveRequest(fixed, request.options))
    if not result.optimal:
        logger.info("Warm start gave no feasible point: %s", result.status.value)
        return None
    return result


def _branch_and_bound(
    request: SolveRequest,
    make_relax: Callable[[ProblemMatrices, SolverOptions], Relax],
    continuous_solve: Callable[[SolveRequest], SolveResult],
) -> SolveResult:
    problem, options = request.problem, request.options
    start = time.perf_counter()
    deadline = start + options.time_limit

    reducer, eliminator = SingletonRowReducer(), FixedColumnEliminator()
    try:
        reduced = eliminator.transform(reducer.transform(problem))
    except InfeasibleBoundaryError as e:
        return SolveResult.failed(SolveStatus.INFEASIBLE, str(e), time.perf_counter() - start)

    search = _Search(reduced, options, make_relax(reduced, options))
    if request.warm_start is not None:
        warm = _warm_incumbent(request, continuous_solve)
        if warm is not None:
            search.offer(warm.x[eliminator.kept_columns], warm.objective)

    search.run(deadline)
    elapsed = time.perf_counter() - start
    logger.info(
        "Branch-and-bound finished: %d nodes, incumbent %.10g, %.3fs",
        search.nodes,
        search.incumbent_value,
        elapsed,
    )

    if search.incumbent is None:
        if search.complete:
            status = SolveStatus.INFEASIBLE
            if search.root_status is SolveStatus.UNBOUNDED:
                status = SolveStatus.UNBOUNDED
            message = "no integral point"
        else:
            status, message = SolveStatus.LIMIT, "limit reached without incumbent"
        result = SolveResult.failed(status, message, elapsed)
        return result.replace(node_count=search.nodes)

    x = eliminator.postsolve(search.incumbent)
    report = audit(problem, x, options.feasibility_tol)
    status = SolveStatus.OPTIMAL if search.complete and report.ok else SolveStatus.LIMIT
    if not report.ok:
        message = str(report)
    elif search.complete:
        message = "optimal within the relative gap"
    else:
        message = "limit reached, incumbent returned"
    return SolveResult(
        status=status,
        x=x,
        objective=problem.objective(x),
        residuals=report.residuals,
        node_count=search.nodes,
        wall_time=elapsed,
        message=message,
        incumbent_trace=tuple(search.trace),
    )


def solve_milp(request: SolveRequest) -> SolveResult:
    """Solves a mixed-integer linear program.

    Node relaxations are linear programs under tightened column bounds. Branching
    takes the most fractional binary, lowest index first unless the options ask for
    random ties, and explores the down branch first.

    Args:
        request: A request whose objective is linear.

    Raises:
        ValueError: The program has nonlinear parts.

    Returns:
        An integral optimum within the relative gap, or status limit with the best
        incumbent found.
    """
    if not request.problem.is_linear:
        raise ValueError("solve_milp requires a linear program")
    if not request.problem.has_binaries:
        return solve_lp(request)
    return _branch_and_bound(request, _linear_relaxation, solve_lp)


def solve_mi_convex(request: SolveRequest) -> SolveResult:
    """Solves a mixed-integer convex program with interior-point node relaxations."""
    if not request.problem.has_binaries:
        return solve_convex(request)
    return _branch_and_bound(request, _convex_relaxation, solve_convex)
