"""Transformer to rewrite quartic squared-norm terms into epigraph form."""

from __future__ import annotations

import dataclasses
from typing import TYPE_CHECKING

import numpy as np
from scipy import sparse

from omtepf.assembler.problem import QuadraticConstraint
from omtepf.transformers.base import ProblemTransformer, append_columns

if TYPE_CHECKING:
    from omtepf.assembler.problem import ProblemMatrices, SquaredNormTerm


@dataclasses.dataclass(frozen=True)
class Epigraph:
    """Epigraph form of one term: s ≥ Σx², objective α s² + β s + γ."""

    constraint: QuadraticConstraint
    column: int
    quadratic: float
    linear: float
    constant: float


def reformulate_quartic(term: SquaredNormTerm, s_column: int) -> Epigraph | None:
    """Introduces the auxiliary s ≥ Σx² for α(Σx²)² + β(Σx²) + γ.

    With α, β ≥ 0 the objective is nondecreasing in s ≥ 0, so s equals Σx² at every
    optimum where α > 0 or β > 0.

    Args:
        term: The squared-norm term.
        s_column: Column of the auxiliary s.

    Raises:
        ValueError: The term is not convex.

    Returns:
        The epigraph form, or None if α and β are both zero.
    """
    if not term.convex:
        raise ValueError(f"Term {term.tag} is not convex: a={term.quartic}, b={term.quadratic}")
    if term.quartic == 0 and term.quadratic == 0:
        return None
    constraint = QuadraticConstraint(
        squares=term.columns,
        linear=((s_column, -1.0),),
        rhs=0.0,
        tag=f"epigraph:{term.tag}",
    )
    return Epigraph(constraint, s_column, term.quartic, term.quadratic, term.constant)


class QuarticEpigraph(ProblemTransformer):
    """Moves convex norm terms out of the objective.

    Terms with a positive quartic coefficient get an auxiliary column and a quadratic
    constraint; purely quadratic terms go into P. Nonconvex terms stay untouched for
    successive linearization.

    Example:
        term 2(x² + y²)² + 3(x² + y²) becomes 2s² + 3s subject to x² + y² − s ≤ 0.
    """

    def __init__(self) -> None:
        self._column_count = 0

    def transform(self, problem: ProblemMatrices) -> ProblemMatrices:
        self._column_count = n = problem.column_count
        quartic = [t for t in problem.norm_terms if t.convex and t.quartic > 0]
        quadratic = [t for t in problem.norm_terms if t.convex and t.quartic == 0]
        rest = tuple(t for t in problem.norm_terms if not t.convex)

        offset = problem.offset
        rows: list[int] = []
        vals: list[float] = []
        for term in quadratic:
            offset += term.constant
            for col in term.columns:
                rows.append(col)
                vals.append(2.0 * term.quadratic)

        names = tuple(f"S_{i}" for i in range(len(quartic)))
        out = append_columns(problem, len(quartic), 0.0, np.inf, names)
        total = out.column_count
        c = out.c.copy()
        constraints = list(out.quadratic_constraints)
        for i, term in enumerate(quartic):
            epi = reformulate_quartic(term, n + i)
            constraints.append(epi.constraint)
            rows.append(epi.column)
            vals.append(2.0 * epi.quadratic)
            c[epi.column] += epi.linear
            offset += epi.constant

        p = sparse.csc_matrix((vals, (rows, rows)), shape=(total, total))
        if out.p is not None:
            p = (p + out.p).tocsc()
        return out.replace(
            c=c,
            p=p,
            offset=offset,
            norm_terms=rest,
            quadratic_constraints=tuple(constraints),
        )

    def postsolve(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x)[: self._column_count]
