"""Presolve: singleton rows and fixed columns."""

from __future__ import annotations

import logging

import numpy as np
from scipy import sparse

from omtepf.assembler.problem import ProblemMatrices, QuadraticConstraint, SquaredNormTerm
from omtepf.exceptions import InfeasibleBoundaryError
from omtepf.transformers.base import ProblemTransformer

logger = logging.getLogger(__name__)

PRESOLVE_TOL = 1e-9


class SingletonRowReducer(ProblemTransformer):
    """Turns rows with a single nonzero into column bounds.

    An equality singleton fixes its column, an inequality singleton tightens it.
    Columns keep their positions, so postsolve is the identity.

    Raises:
        InfeasibleBoundaryError: A singleton contradicts the bounds of its column, or
            fixes a binary column to a fractional value.
    """

    def transform(self, problem: ProblemMatrices) -> ProblemMatrices:
        lower, upper = problem.lower.copy(), problem.upper.copy()

        a_eq = problem.a_eq.tocsr()
        eq_single = np.flatnonzero(np.diff(a_eq.indptr) == 1)
        for row in eq_single.tolist():
            col = int(a_eq.indices[a_eq.indptr[row]])
            value = problem.b_eq[row] / a_eq.data[a_eq.indptr[row]]
            if problem.binary[col] and abs(value - round(value)) > PRESOLVE_TOL:
                raise InfeasibleBoundaryError(
                    f"Row {problem.eq_tags[row]} fixes binary column {col} to {value}"
                )
            _tighten(lower, upper, col, value, value, problem.eq_tags[row])

        a_ineq = problem.a_ineq.tocsr()
        ineq_single = np.flatnonzero(np.diff(a_ineq.indptr) == 1)
        for row in ineq_single.tolist():
            col = int(a_ineq.indices[a_ineq.indptr[row]])
            coef = a_ineq.data[a_ineq.indptr[row]]
            lo, hi = problem.ineq_lower[row] / coef, problem.ineq_upper[row] / coef
            if coef < 0:
                lo, hi = hi, lo
            _tighten(lower, upper, col, lo, hi, problem.ineq_tags[row])

        keep_eq = np.setdiff1d(np.arange(a_eq.shape[0]), eq_single)
        keep_ineq = np.setdiff1d(np.arange(a_ineq.shape[0]), ineq_single)
        logger.debug(
            "Singleton rows removed: %d equality, %d inequality", eq_single.size, ineq_single.size
        )
        return problem.replace(
            a_eq=a_eq[keep_eq],
            b_eq=problem.b_eq[keep_eq],
            eq_tags=tuple(problem.eq_tags[i] for i in keep_eq),
            a_ineq=a_ineq[keep_ineq],
            ineq_lower=problem.ineq_lower[keep_ineq],
            ineq_upper=problem.ineq_upper[keep_ineq],
            ineq_tags=tuple(problem.ineq_tags[i] for i in keep_ineq),
            lower=lower,
            upper=upper,
        )


class FixedColumnEliminator(ProblemTransformer):
    """Removes columns whose bounds coincide.

    Their contribution moves into the row right-hand sides and the objective offset.
    Columns used by P, norm terms or quadratic constraints are kept.

    Raises:
        InfeasibleBoundaryError: A row left without columns is violated.
    """

    def __init__(self) -> None:
        self._fixed_values = np.zeros(0)
        self._keep = np.zeros(0, dtype=np.int64)

    def transform(self, problem: ProblemMatrices) -> ProblemMatrices:
        n = problem.column_count
        nonlinear = np.zeros(n, dtype=bool)
        if problem.p is not None and problem.p.nnz:
            coo = problem.p.tocoo()
            nonlinear[coo.row] = True
            nonlinear[coo.col] = True
        for term in problem.norm_terms:
            nonlinear[list(term.columns)] = True
        for constraint in problem.quadratic_constraints:
            nonlinear[list(constraint.squares)] = True
            nonlinear[[col for col, _ in constraint.linear]] = True

        fixed = (np.abs(problem.upper - problem.lower) <= PRESOLVE_TOL) & ~nonlinear
        keep = np.flatnonzero(~fixed)
        values = np.where(fixed, problem.lower, 0.0)
        self._fixed_values = values
        self._keep = keep

        a_eq = problem.a_eq.tocsc()
        a_ineq = problem.a_ineq.tocsc()
        b_eq = problem.b_eq - a_eq @ values
        shift = a_ineq @ values
        ineq_lower = problem.ineq_lower - shift
        ineq_upper = problem.ineq_upper - shift
        a_eq, a_ineq = a_eq[:, keep].tocsr(), a_ineq[:, keep].tocsr()

        empty_eq = np.diff(a_eq.indptr) == 0
        bad = np.flatnonzero(empty_eq & (np.abs(b_eq) > PRESOLVE_TOL * (1 + np.abs(problem.b_eq))))
        if bad.size:
            raise InfeasibleBoundaryError(
                f"Row {problem.eq_tags[bad[0]]} has no free column and residual {b_eq[bad[0]]}"
            )
        empty_ineq = np.diff(a_ineq.indptr) == 0
        bad = np.flatnonzero(
            empty_ineq & ((ineq_lower > PRESOLVE_TOL) | (ineq_upper < -PRESOLVE_TOL))
        )
        if bad.size:
            raise InfeasibleBoundaryError(
                f"Row {problem.ineq_tags[bad[0]]} has no free column and is violated"
            )

        remap = np.full(n, -1, dtype=np.int64)
        remap[keep] = np.arange(keep.size)
        keep_eq = np.flatnonzero(~empty_eq)
        keep_ineq = np.flatnonzero(~empty_ineq)
        logger.debug("Fixed columns removed: %d of %d", n - keep.size, n)
        return problem.replace(
            index=None,
            binary=problem.binary[keep],
            a_eq=a_eq[keep_eq],
            b_eq=b_eq[keep_eq],
            eq_tags=tuple(problem.eq_tags[i] for i in keep_eq),
            a_ineq=a_ineq[keep_ineq],
            ineq_lower=ineq_lower[keep_ineq],
            ineq_upper=ineq_upper[keep_ineq],
            ineq_tags=tuple(problem.ineq_tags[i] for i in keep_ineq),
            lower=problem.lower[keep],
            upper=problem.upper[keep],
            c=problem.c[keep],
            offset=problem.offset + float(problem.c @ values),
            p=None if problem.p is None else sparse.csc_matrix(problem.p)[keep][:, keep],
            norm_terms=tuple(_remap_term(t, remap) for t in problem.norm_terms),
            quadratic_constraints=tuple(
                _remap_constraint(q, remap) for q in problem.quadratic_constraints
            ),
            column_names=tuple(problem.column_names[i] for i in keep)
            if problem.column_names
            else (),
        )

    @property
    def kept_columns(self) -> np.ndarray:
        """Original positions of the columns left by the last transform."""
        return self._keep

    def postsolve(self, x: np.ndarray) -> np.ndarray:
        full = self._fixed_values.copy()
        full[self._keep] = x
        return full


def _tighten(
    lower: np.ndarray, upper: np.ndarray, col: int, lo: float, hi: float, tag: object
) -> None:
    lower[col] = max(lower[col], lo)
    upper[col] = min(upper[col], hi)
    if lower[col] > upper[col] + PRESOLVE_TOL:
        raise InfeasibleBoundaryError(
            f"Row {tag} leaves column {col} with empty range [{lower[col]}, {upper[col]}]"
        )
    if lower[col] > upper[col]:
        upper[col] = lower[col]


def _remap_term(term: SquaredNormTerm, remap: np.ndarray) -> SquaredNormTerm:
    return SquaredNormTerm(
        columns=tuple(int(remap[c]) for c in term.columns),
        quartic=term.quartic,
        quadratic=term.quadratic,
        constant=term.constant,
        tag=term.tag,
    )


def _remap_constraint(constraint: QuadraticConstraint, remap: np.ndarray) -> QuadraticConstraint:
    return QuadraticConstraint(
        squares=tuple(int(remap[c]) for c in constraint.squares),
        linear=tuple((int(remap[c]), v) for c, v in constraint.linear),
        rhs=constraint.rhs,
        tag=constraint.tag,
    )
