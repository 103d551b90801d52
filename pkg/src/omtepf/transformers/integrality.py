"""Transformers on the integrality of binary columns."""

from __future__ import annotations

import numpy as np

from omtepf.assembler.problem import ProblemMatrices
from omtepf.exceptions import InfeasibleBoundaryError
from omtepf.transformers.base import ProblemTransformer


class IntegralityRelaxer(ProblemTransformer):
    """Drops the binary kind of every column, keeping its [0, 1] bounds."""

    def transform(self, problem: ProblemMatrices) -> ProblemMatrices:
        return problem.replace(binary=np.zeros_like(problem.binary))


class BinaryFixer(ProblemTransformer):
    """Fixes every binary column to the rounded value of a given point.

    Args:
        point: A full-length point; its binary entries are rounded.

    Raises:
        InfeasibleBoundaryError: A rounded value lies outside the column bounds.
    """

    def __init__(self, point: np.ndarray):
        self._point = np.asarray(point, dtype=float)

    def transform(self, problem: ProblemMatrices) -> ProblemMatrices:
        if self._point.shape != (problem.column_count,):
            raise ValueError(
                f"Point has shape {self._point.shape}, expected ({problem.column_count},)"
            )
        binary = problem.binary
        values = np.round(self._point[binary])
        lower, upper = problem.lower.copy(), problem.upper.copy()
        if np.any(values < lower[binary]) or np.any(values > upper[binary]):
            raise InfeasibleBoundaryError("Fixed binary values violate the column bounds")
        lower[binary] = values
        upper[binary] = values
        return problem.replace(lower=lower, upper=upper, binary=np.zeros_like(binary))
