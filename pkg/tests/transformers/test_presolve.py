"""Tests for omtepf.transformers.presolve."""

from __future__ import annotations

import numpy as np
import pytest

from omtepf.assembler.problem import SquaredNormTerm
from omtepf.exceptions import InfeasibleBoundaryError
from omtepf.transformers.presolve import FixedColumnEliminator, SingletonRowReducer
from tests.utils import make_problem


def test_singleton_rows() -> None:
    problem = make_problem(
        [1.0, 1.0, 1.0],
        a_eq=[[2.0, 0.0, 0.0], [0.0, 1.0, 1.0]],
        b_eq=[3.0, 1.0],
        a_ineq=[[0.0, -2.0, 0.0]],
        ineq_upper=[-1.0],
        upper=[5.0, 5.0, 5.0],
    )
    reduced = SingletonRowReducer().transform(problem)
    assert reduced.a_eq.shape == (1, 3)
    assert reduced.a_ineq.shape == (0, 3)
    assert reduced.lower[0] == reduced.upper[0] == 1.5
    # -2 x1 <= -1 means x1 >= 0.5
    assert reduced.lower[1] == 0.5


def test_singleton_rows_conflict() -> None:
    problem = make_problem([1.0], a_eq=[[1.0]], b_eq=[3.0], upper=[2.0])
    with pytest.raises(InfeasibleBoundaryError, match="empty range"):
        SingletonRowReducer().transform(problem)


def test_singleton_rows_fractional_binary() -> None:
    problem = make_problem([1.0], a_eq=[[2.0]], b_eq=[1.0], upper=[1.0], binary=[True])
    with pytest.raises(InfeasibleBoundaryError, match="binary"):
        SingletonRowReducer().transform(problem)


def test_fixed_columns() -> None:
    problem = make_problem(
        [1.0, 2.0, 3.0],
        a_eq=[[1.0, 1.0, 1.0]],
        b_eq=[6.0],
        lower=[1.0, 0.0, 2.0],
        upper=[1.0, 9.0, 2.0],
        norm_terms=[SquaredNormTerm((2,), quartic=0.0, quadratic=1.0)],
    )
    eliminator = FixedColumnEliminator()
    reduced = eliminator.transform(problem)
    # column 2 is fixed but used by a norm term
    np.testing.assert_array_equal(eliminator.kept_columns, [1, 2])
    np.testing.assert_array_equal(reduced.b_eq, [5.0])
    assert reduced.offset == 1.0
    assert reduced.norm_terms[0].columns == (1,)
    np.testing.assert_array_equal(eliminator.postsolve(np.array([3.0, 2.0])), [1.0, 3.0, 2.0])


def test_fixed_columns_violated_row() -> None:
    problem = make_problem([0.0], a_eq=[[1.0]], b_eq=[2.0], lower=[1.0], upper=[1.0])
    with pytest.raises(InfeasibleBoundaryError, match="no free column"):
        FixedColumnEliminator().transform(problem)
