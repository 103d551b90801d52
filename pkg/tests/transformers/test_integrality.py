"""Tests for omtepf.transformers.integrality."""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np
import pytest

from omtepf.exceptions import InfeasibleBoundaryError
from omtepf.transformers.integrality import BinaryFixer, IntegralityRelaxer
from tests.utils import make_problem

if TYPE_CHECKING:
    from omtepf.assembler.problem import ProblemMatrices


def _problem() -> ProblemMatrices:
    return make_problem([1.0, 1.0, 1.0], upper=[1.0, 1.0, 5.0], binary=[True, True, False])


def test_relaxer() -> None:
    relaxed = IntegralityRelaxer().transform(_problem())
    assert not relaxed.has_binaries
    np.testing.assert_array_equal(relaxed.upper, [1.0, 1.0, 5.0])


def test_fixer() -> None:
    fixed = BinaryFixer(np.array([0.9, 0.2, 3.3])).transform(_problem())
    assert not fixed.has_binaries
    np.testing.assert_array_equal(fixed.lower, [1.0, 0.0, 0.0])
    np.testing.assert_array_equal(fixed.upper, [1.0, 0.0, 5.0])


def test_fixer_rejects_bounds() -> None:
    problem = _problem().replace(upper=np.array([0.0, 1.0, 5.0]))
    with pytest.raises(InfeasibleBoundaryError):
        BinaryFixer(np.array([1.0, 0.0, 0.0])).transform(problem)


def test_fixer_rejects_length() -> None:
    with pytest.raises(ValueError, match="shape"):
        BinaryFixer(np.zeros(2)).transform(_problem())
