"""Tests for omtepf.solvers.audit."""

from __future__ import annotations

import numpy as np
import pytest

from omtepf.assembler.problem import QuadraticConstraint
from omtepf.assembler.program import assemble
from omtepf.solvers.audit import audit
from tests.utils import make_problem, move_spec


def test_audit_passes() -> None:
    problem = make_problem([0.0, 0.0], a_eq=[[1.0, 1.0]], b_eq=[2.0])
    report = audit(problem, np.array([1.5, 0.5]))
    assert report.ok
    assert report.worst == 0.0
    assert str(report).startswith("audit passed")


def test_audit_residuals() -> None:
    problem = make_problem(
        [0.0, 0.0],
        a_eq=[[1.0, 1.0]],
        b_eq=[2.0],
        a_ineq=[[1.0, 0.0]],
        ineq_upper=[0.5],
        upper=[1.0, 1.0],
        binary=[False, True],
        quadratic_constraints=[QuadraticConstraint((0,), (), 0.25, "ring:1")],
    )
    report = audit(problem, np.array([1.0, 0.5]), tol=1e-6)
    assert report.residuals["eq:eq_row"] == pytest.approx(0.5)
    assert report.residuals["ineq:ineq_row"] == pytest.approx(0.5)
    assert report.residuals["integrality"] == pytest.approx(0.5)
    assert report.residuals["quadratic:ring"] == pytest.approx(0.75)
    assert report.residuals["bounds"] == 0.0
    assert not report.ok
    assert report.worst == pytest.approx(0.75)
    assert str(report).startswith("audit failed: eq:eq_row=0.5")


def test_audit_keys_follow_families() -> None:
    problem = assemble(move_spec())
    x = np.zeros(problem.column_count)
    report = audit(problem, x)
    assert report.residuals["bounds:Q_B"] == pytest.approx(1.0)
    assert "eq:esn_places" in report.residuals
    assert set(report.violations) == {"bounds:Q_B"}


def test_audit_rejects_bad_shape() -> None:
    with pytest.raises(ValueError, match="shape"):
        audit(make_problem([0.0, 0.0]), np.zeros(3))
