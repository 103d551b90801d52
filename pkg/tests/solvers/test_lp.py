"""Tests for omtepf.solvers.lp."""

from __future__ import annotations

import numpy as np
import pytest

from omtepf.solvers.lp import solve_lp
from omtepf.solvers.types import SolveRequest, SolveStatus
from tests.utils import make_problem


def test_solve_lp() -> None:
    problem = make_problem([-1.0, -1.0], a_ineq=[[1.0, 2.0]], ineq_upper=[4.0], upper=[3.0, 3.0])
    result = solve_lp(SolveRequest(problem))
    assert result.optimal
    np.testing.assert_allclose(result.x, [3.0, 0.5], atol=1e-8)
    assert result.objective == pytest.approx(-3.5)
    assert "ineq_upper" in result.duals
    assert result.residuals["bounds"] == pytest.approx(0.0, abs=1e-9)


def test_solve_lp_infeasible() -> None:
    problem = make_problem([1.0, 1.0], a_eq=[[1.0, 1.0]], b_eq=[5.0], upper=[1.0, 1.0])
    result = solve_lp(SolveRequest(problem))
    assert result.status is SolveStatus.INFEASIBLE
    assert not result.has_point


def test_solve_lp_rejects_binaries() -> None:
    problem = make_problem([1.0], upper=[1.0], binary=[True])
    with pytest.raises(ValueError, match="binary"):
        solve_lp(SolveRequest(problem))
