"""Primal-dual interior-point method for convex quadratically constrained programs.

The method works on

    minimize   ½xᵀPx + cᵀx
    subject to A x = b
               G x ≤ h                  (linear rows and finite column bounds)
               Σ x_j² + aᵀx ≤ r         (quadratic constraints)

with slacks s and multipliers z on every inequality. Each iteration factors the
regularized KKT matrix

    [ W + JᵀDJ + δI   Aᵀ  ]
    [ A              −εI  ]

once with a sparse LU, where D = Z S⁻¹ and W is the Hessian of the Lagrangian, and
reuses the factors for the Mehrotra predictor and corrector.

Quartic norm terms are rewritten into epigraph form first. Concave parts of norm
terms are handled by successive linearization: each pass replaces them by their
tangent at the previous point and solves the resulting convex program.
"""

from __future__ import annotations

import dataclasses
import logging
import time
from typing import TYPE_CHECKING

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from omtepf.assembler.problem import SquaredNormTerm
from omtepf.exceptions import InfeasibleBoundaryError
from omtepf.solvers.audit import audit
from omtepf.solvers.types import SolveResult, SolveStatus
from omtepf.transformers.presolve import FixedColumnEliminator, SingletonRowReducer
from omtepf.transformers.quartic_epigraph import QuarticEpigraph

if TYPE_CHECKING:
    from omtepf.assembler.problem import ProblemMatrices
    from omtepf.config import SolverOptions
    from omtepf.solvers.types import SolveRequest

logger = logging.getLogger(__name__)

STEP_FRACTION = 0.995
PRIMAL_REG = 1e-9
DUAL_REG = 1e-9
DIVERGENCE = 1e10


@dataclasses.dataclass(frozen=True, eq=False)
class _Form:
    p: sparse.csc_matrix
    c: np.ndarray
    a: sparse.csr_matrix
    b: np.ndarray
    g: sparse.csr_matrix
    h: np.ndarray
    q_rows: np.ndarray
    q_cols: np.ndarray
    q_lin_rows: np.ndarray
    q_lin_cols: np.ndarray
    q_lin_vals: np.ndarray
    q_rhs: np.ndarray
    linear_rows: int

    @property
    def n(self) -> int:
        return len(self.c)

    @property
    def quadratic_rows(self) -> int:
        return len(self.q_rhs)

    @property
    def m(self) -> int:
        return self.linear_rows + self.quadratic_rows

    def quad_values(self, x: np.ndarray) -> np.ndarray:
        values = np.bincount(self.q_rows, weights=x[self.q_cols] ** 2, minlength=self.quadratic_rows)
        values += np.bincount(
            self.q_lin_rows, weights=self.q_lin_vals * x[self.q_lin_cols], minlength=self.quadratic_rows
        )
        return values - self.q_rhs

    def constraints(self, x: np.ndarray) -> np.ndarray:
        return np.concatenate([self.g @ x - self.h, self.quad_values(x)])

    def jacobian(self, x: np.ndarray) -> sparse.csr_matrix:
        rows = np.concatenate([self.q_rows, self.q_lin_rows])
        cols = np.concatenate([self.q_cols, self.q_lin_cols])
        vals = np.concatenate([2.0 * x[self.q_cols], self.q_lin_vals])
        quad = sparse.coo_matrix((vals, (rows, cols)), shape=(self.quadratic_rows, self.n))
        return sparse.vstack([self.g, quad], format="csr")

    def hessian_diagonal(self, z_quad: np.ndarray) -> np.ndarray:
        return np.bincount(self.q_cols, weights=2.0 * z_quad[self.q_rows], minlength=self.n)


def _build_form(problem: ProblemMatrices) -> _Form:
    n = problem.column_count
    lower, upper = problem.lower, problem.upper
    fixed = np.flatnonzero(lower == upper)
    free = lower != upper

    fix_rows = sparse.csr_matrix(
        (np.ones(fixed.size), (np.arange(fixed.size), fixed)), shape=(fixed.size, n)
    )
    a = sparse.vstack([problem.a_eq, fix_rows], format="csr")
    b = np.concatenate([problem.b_eq, lower[fixed]])

    up_rows = np.flatnonzero(np.isfinite(problem.ineq_upper))
    lo_rows = np.flatnonzero(np.isfinite(problem.ineq_lower))
    up_cols = np.flatnonzero(free & np.isfinite(upper))
    lo_cols = np.flatnonzero(free & np.isfinite(lower))
    eye = sparse.identity(n, format="csr")
    g = sparse.vstack(
        [
            problem.a_ineq[up_rows],
            -problem.a_ineq[lo_rows],
            eye[up_cols],
            -eye[lo_cols],
        ],
        format="csr",
    )
    h = np.concatenate(
        [problem.ineq_upper[up_rows], -problem.ineq_lower[lo_rows], upper[up_cols], -lower[lo_cols]]
    )

    q_rows, q_cols, l_rows, l_cols, l_vals = [], [], [], [], []
    for i, constraint in enumerate(problem.quadratic_constraints):
        q_rows.extend([i] * len(constraint.squares))
        q_cols.extend(constraint.squares)
        for col, coef in constraint.linear:
            l_rows.append(i)
            l_cols.append(col)
            l_vals.append(coef)

    p = problem.p if problem.p is not None else sparse.csc_matrix((n, n))
    return _Form(
        p=sparse.csc_matrix(p),
        c=problem.c,
        a=a,
        b=b,
        g=g,
        h=h,
        q_rows=np.asarray(q_rows, dtype=np.int64),
        q_cols=np.asarray(q_cols, dtype=np.int64),
        q_lin_rows=np.asarray(l_rows, dtype=np.int64),
        q_lin_cols=np.asarray(l_cols, dtype=np.int64),
        q_lin_vals=np.asarray(l_vals, dtype=float),
        q_rhs=np.asarray([q.rhs for q in problem.quadratic_constraints], dtype=float),
        linear_rows=g.shape[0],
    )


def _starting_point(problem: ProblemMatrices, hint: np.ndarray | None) -> np.ndarray:
    lower, upper = problem.lower, problem.upper
    x = np.zeros(problem.column_count) if hint is None else np.asarray(hint, dtype=float).copy()
    both = np.isfinite(lower) & np.isfinite(upper)
    width = np.where(both, upper - lower, 1.0)
    margin = np.minimum(0.1 * width, 1.0)
    lo_only = np.isfinite(lower)
    up_only = np.isfinite(upper)
    x = np.where(lo_only & (x < lower + margin), lower + margin, x)
    x = np.where(up_only & (x > upper - margin), upper - margin, x)
    x = np.where(both & (width <= 0), lower, x)
    return x


def _max_step(v: np.ndarray, dv: np.ndarray) -> float:
    shrinking = dv < 0
    if not shrinking.any():
        return 1.0
    return float(min(1.0, np.min(-v[shrinking] / dv[shrinking])))


@dataclasses.dataclass(frozen=True, eq=False)
class _Outcome:
    status: SolveStatus
    x: np.ndarray
    iterations: int
    message: str
    quadratic_duals: np.ndarray


def _interior_point(
    problem: ProblemMatrices, options: SolverOptions, hint: np.ndarray | None = None
) -> _Outcome:
    """Solves a program without norm terms and without binary columns."""
    form = _build_form(problem)
    n, m, me = form.n, form.m, form.a.shape[0]
    tol = options.ipm_tol

    x = _starting_point(problem, hint)
    s = np.maximum(-form.constraints(x), 1.0)
    z = np.ones(m)
    y = np.zeros(me)

    b_scale = 1.0 + max(np.abs(form.b).max(initial=0.0), np.abs(form.h[np.isfinite(form.h)]).max(initial=0.0))
    c_scale = 1.0 + np.abs(form.c).max(initial=0.0)
    primal = np.inf

    for iteration in range(1, options.ipm_max_iter + 1):
        g = form.constraints(x)
        jac = form.jacobian(x)
        r_d = form.p @ x + form.c + form.a.T @ y + jac.T @ z
        r_pe = form.a @ x - form.b
        r_pi = g + s
        mu = float(s @ z) / m if m else 0.0
        primal = max(np.abs(r_pe).max(initial=0.0), np.maximum(g, 0.0).max(initial=0.0))
        dual = float(np.abs(r_d).max(initial=0.0))
        logger.debug(
            "ipm %3d: primal %.3e dual %.3e mu %.3e", iteration, primal, dual, mu
        )
        if primal <= tol * b_scale and dual <= tol * c_scale and mu <= tol:
            return _Outcome(
                SolveStatus.OPTIMAL, x, iteration, "converged", z[form.linear_rows :]
            )
        if np.abs(x).max(initial=0.0) > DIVERGENCE:
            return _Outcome(
                SolveStatus.UNBOUNDED, x, iteration, "iterates diverge", z[form.linear_rows :]
            )

        d = z / s
        hess = form.p + sparse.diags(form.hessian_diagonal(z[form.linear_rows :]))
        hess = hess + jac.T @ sparse.diags(d) @ jac + PRIMAL_REG * sparse.identity(n)
        if me:
            kkt = sparse.bmat(
                [[hess, form.a.T], [form.a, -DUAL_REG * sparse.identity(me)]], format="csc"
            )
        else:
            kkt = sparse.csc_matrix(hess)
        try:
            lu = splu(kkt)
        except RuntimeError as e:
            return _Outcome(
                SolveStatus.LIMIT, x, iteration, f"KKT factorization failed: {e}", z[form.linear_rows :]
            )

        def direction(r_c: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
            rhs = np.concatenate([-r_d - jac.T @ ((r_c + z * r_pi) / s), -r_pe])
            sol = lu.solve(rhs)
            dx, dy = sol[:n], sol[n:]
            ds = -r_pi - jac @ dx
            dz = (r_c - z * ds) / s
            return dx, dy, ds, dz

        dx, dy, ds, dz = direction(-s * z)
        if m:
            alpha_p = _max_step(s, ds)
            alpha_d = _max_step(z, dz)
            mu_aff = float((s + alpha_p * ds) @ (z + alpha_d * dz)) / m
            sigma = (mu_aff / mu) ** 3 if mu > 0 else 0.0
            dx, dy, ds, dz = direction(sigma * mu - s * z - ds * dz)
            alpha = min(1.0, STEP_FRACTION * _max_step(s, ds), STEP_FRACTION * _max_step(z, dz))
        else:
            alpha = 1.0

        x = x + alpha * dx
        y = y + alpha * dy
        s = s + alpha * ds
        z = z + alpha * dz

    status = SolveStatus.INFEASIBLE if primal > options.feasibility_tol else SolveStatus.LIMIT
    return _Outcome(
        status, x, options.ipm_max_iter, "iteration limit reached", z[form.linear_rows :]
    )


def split_concave(term: SquaredNormTerm) -> tuple[SquaredNormTerm, SquaredNormTerm | None]:
    """Splits a norm term into its convex part and its concave remainder."""
    convex = SquaredNormTerm(
        term.columns, max(term.quartic, 0.0), max(term.quadratic, 0.0), term.constant, term.tag
    )
    if term.convex:
        return convex, None
    concave = SquaredNormTerm(
        term.columns, min(term.quartic, 0.0), min(term.quadratic, 0.0), 0.0, term.tag
    )
    return convex, concave


def _linearize(concave: list[SquaredNormTerm], x: np.ndarray, n: int) -> tuple[np.ndarray, float]:
    """Tangent of the concave terms at x: returns (gradient, offset)."""
    grad = np.zeros(n)
    offset = 0.0
    for term in concave:
        cols = list(term.columns)
        r = float(np.sum(x[cols] ** 2))
        slope = 2.0 * term.quartic * r + term.quadratic
        grad[cols] += 2.0 * slope * x[cols]
        offset += term.value(x) - 2.0 * slope * r
    return grad, offset


@dataclasses.dataclass(frozen=True, eq=False)
class ConvexOutcome:
    status: SolveStatus
    x: np.ndarray | None
    objective: float
    message: str
    iterations: int = 0
    quadratic_duals: np.ndarray | None = None


def solve_convex_problem(
    problem: ProblemMatrices, options: SolverOptions, hint: np.ndarray | None = None
) -> ConvexOutcome:
    """Solves a program without binary columns in its own column space.

    Norm terms are split, their convex parts rewritten into epigraph form and their
    concave parts linearized pass after pass.
    """
    parts = [split_concave(t) for t in problem.norm_terms]
    concave = [cv for _, cv in parts if cv is not None]
    convex_problem = problem.replace(norm_terms=tuple(cx for cx, _ in parts))
    epigraph = QuarticEpigraph()
    base = epigraph.transform(convex_problem)
    n = problem.column_count

    point = None if hint is None else np.concatenate(
        [np.asarray(hint, dtype=float), np.zeros(base.column_count - n)]
    )
    if point is not None:
        for i, term in enumerate(t for t in convex_problem.norm_terms if t.quartic > 0):
            point[n + i] = float(np.sum(point[list(term.columns)] ** 2)) + 1.0

    previous = np.inf
    iterations = 0
    outcome = None
    for dc_pass in range(1, options.dc_max_iter + 1):
        program = base
        if concave:
            anchor = np.zeros(n) if point is None else point[:n]
            grad, offset = _linearize(concave, anchor, n)
            c = base.c.copy()
            c[:n] += grad
            program = base.replace(c=c, offset=base.offset + offset)
        outcome = _interior_point(program, options, point)
        iterations += outcome.iterations
        if outcome.status is not SolveStatus.OPTIMAL:
            break
        point = outcome.x
        value = problem.objective(epigraph.postsolve(point))
        logger.debug("convex pass %d: objective %.10g", dc_pass, value)
        if not concave or abs(previous - value) <= options.dc_tol * max(1.0, abs(value)):
            break
        previous = value

    if outcome is None or outcome.status is not SolveStatus.OPTIMAL:
        x = outcome.x if outcome is not None and outcome.status is SolveStatus.LIMIT else None
        x = None if x is None else epigraph.postsolve(x)
        return ConvexOutcome(
            outcome.status if outcome else SolveStatus.LIMIT,
            x,
            np.nan if x is None else problem.objective(x),
            outcome.message if outcome else "no pass",
            iterations,
        )
    x = epigraph.postsolve(point)
    duals = outcome.quadratic_duals[: len(problem.quadratic_constraints)]
    return ConvexOutcome(
        SolveStatus.OPTIMAL, x, problem.objective(x), outcome.message, iterations, duals
    )


def solve_convex(request: SolveRequest) -> SolveResult:
    """Solves a convex program, or a difference-of-convex one by linearization.

    Args:
        request: A request without binary columns.

    Raises:
        ValueError: The program has binary columns.

    Returns:
        The result. An optimal point that fails the residual audit is reported with
        status limit. Duals hold the multipliers of the quadratic constraints.
    """
    problem = request.problem
    if problem.has_binaries:
        raise ValueError("solve_convex requires a program without binary columns")
    options = request.options
    start = time.perf_counter()

    reducer, eliminator = SingletonRowReducer(), FixedColumnEliminator()
    try:
        reduced = eliminator.transform(reducer.transform(problem))
    except InfeasibleBoundaryError as e:
        return SolveResult.failed(SolveStatus.INFEASIBLE, str(e), time.perf_counter() - start)

    hint = None
    if request.warm_start is not None:
        hint = np.asarray(request.warm_start, dtype=float)[eliminator.kept_columns]
    outcome = solve_convex_problem(reduced, options, hint)
    elapsed = time.perf_counter() - start
    logger.info(
        "Convex solve: %s after %d iterations in %.3fs",
        outcome.status.value,
        outcome.iterations,
        elapsed,
    )
    if outcome.x is None:
        return SolveResult.failed(outcome.status, outcome.message, elapsed)

    x = eliminator.postsolve(outcome.x)
    report = audit(problem, x, options.feasibility_tol)
    status = outcome.status
    message = outcome.message
    if status is SolveStatus.OPTIMAL and not report.ok:
        status, message = SolveStatus.LIMIT, str(report)
    duals = None if outcome.quadratic_duals is None else {"quadratic": outcome.quadratic_duals}
    return SolveResult(
        status=status,
        x=x,
        objective=problem.objective(x),
        residuals=report.residuals,
        node_count=0,
        wall_time=elapsed,
        message=message,
        duals=duals,
    )
