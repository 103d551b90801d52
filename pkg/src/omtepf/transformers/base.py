"""Base class of program transformers."""

from __future__ import annotations

from abc import ABCMeta, abstractmethod
from typing import TYPE_CHECKING

import numpy as np
from scipy import sparse

if TYPE_CHECKING:
    from omtepf.assembler.problem import ProblemMatrices


class ProblemTransformer(metaclass=ABCMeta):
    """Rewrites a program into an equivalent one.

    `postsolve` maps a solution of the rewritten program back to the columns of the
    program last given to `transform`.
    """

    @abstractmethod
    def transform(self, problem: ProblemMatrices) -> ProblemMatrices:
        raise NotImplementedError

    def postsolve(self, x: np.ndarray) -> np.ndarray:
        return x


def append_columns(
    problem: ProblemMatrices,
    count: int,
    lower: float = 0.0,
    upper: float = np.inf,
    names: tuple[str, ...] = (),
) -> ProblemMatrices:
    """Returns a copy with `count` continuous columns appended, unused by any row."""
    n = problem.column_count
    p = None
    if problem.p is not None:
        p = sparse.csc_matrix(problem.p, shape=problem.p.shape).copy()
        p.resize((n + count, n + count))
    column_names = problem.column_names + names if problem.column_names else ()
    return problem.replace(
        binary=np.concatenate([problem.binary, np.zeros(count, dtype=bool)]),
        a_eq=sparse.hstack([problem.a_eq, sparse.csr_matrix((problem.a_eq.shape[0], count))], format="csr"),
        a_ineq=sparse.hstack(
            [problem.a_ineq, sparse.csr_matrix((problem.a_ineq.shape[0], count))], format="csr"
        ),
        lower=np.concatenate([problem.lower, np.full(count, lower)]),
        upper=np.concatenate([problem.upper, np.full(count, upper)]),
        c=np.concatenate([problem.c, np.zeros(count)]),
        p=p,
        column_names=column_names,
    )
