"""Tests for omtepf.transformers.quartic_epigraph."""

from __future__ import annotations

import numpy as np
import pytest

from omtepf.assembler.problem import SquaredNormTerm
from omtepf.transformers.quartic_epigraph import QuarticEpigraph, reformulate_quartic
from tests.utils import make_problem


def test_reformulate_quartic() -> None:
    epigraph = reformulate_quartic(SquaredNormTerm((0, 1), 2.0, 3.0, 1.0, "gen"), 5)
    assert epigraph.column == 5
    assert epigraph.constraint.squares == (0, 1)
    assert epigraph.constraint.linear == ((5, -1.0),)
    assert epigraph.constraint.tag == "epigraph:gen"
    assert (epigraph.quadratic, epigraph.linear, epigraph.constant) == (2.0, 3.0, 1.0)


def test_reformulate_zero_term() -> None:
    assert reformulate_quartic(SquaredNormTerm((0,), 0.0, 0.0, 4.0), 1) is None


def test_reformulate_nonconvex() -> None:
    with pytest.raises(ValueError, match="not convex"):
        reformulate_quartic(SquaredNormTerm((0,), 0.0, -1.0), 1)


def test_transform() -> None:
    problem = make_problem(
        [0.0, 0.0, 0.0],
        lower=[-1.0, -1.0, -1.0],
        norm_terms=[
            SquaredNormTerm((0, 1), 2.0, 3.0, 0.5, "gen"),
            SquaredNormTerm((2,), 0.0, 1.5, 0.25, "demand"),
            SquaredNormTerm((2,), 0.0, -1.0, 0.0, "concave"),
        ],
    )
    epigraph = QuarticEpigraph()
    out = epigraph.transform(problem)
    assert out.column_count == 4
    assert out.lower[3] == 0.0
    assert [t.tag for t in out.norm_terms] == ["concave"]
    np.testing.assert_array_equal(out.p.diagonal(), [0.0, 0.0, 3.0, 4.0])
    assert out.c[3] == 3.0
    assert out.offset == 0.75
    (constraint,) = out.quadratic_constraints
    assert constraint.linear == ((3, -1.0),)

    # the rewritten objective matches the original at s = Σx²
    x = np.array([0.3, -0.4, 0.2])
    lifted = np.append(x, 0.25)
    assert out.objective(lifted) == pytest.approx(problem.objective(x))
    np.testing.assert_array_equal(epigraph.postsolve(lifted), x)
