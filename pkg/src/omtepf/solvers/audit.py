"""Residual audit of a point against a program, independent of any solver."""

from __future__ import annotations

import collections
import dataclasses
import logging
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from omtepf.assembler.problem import ProblemMatrices, RowTag

logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class AuditReport:
    """Largest violation per constraint family and the families over tolerance."""

    residuals: dict[str, float]
    tol: float

    @property
    def violations(self) -> dict[str, float]:
        return {k: v for k, v in self.residuals.items() if v > self.tol}

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def worst(self) -> float:
        return max(self.residuals.values(), default=0.0)

    def __str__(self) -> str:
        if self.ok:
            return f"audit passed (worst residual {self.worst:.3g})"
        details = ", ".join(f"{k}={v:.3g}" for k, v in sorted(self.violations.items()))
        return f"audit failed: {details}"


def audit(
    problem: ProblemMatrices,
    x: np.ndarray,
    tol: float = 1e-6,
) -> AuditReport:
    """Computes the residual of every constraint family at x.

    Args:
        problem: The program.
        x: The point.
        tol: Tolerance shared by rows, bounds and integrality.

    Returns:
        The report.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (problem.column_count,):
        raise ValueError(f"Point has shape {x.shape}, expected ({problem.column_count},)")
    residuals: dict[str, float] = collections.defaultdict(float)

    def record(prefix: str, tags: tuple[RowTag, ...], violation: np.ndarray) -> None:
        for tag, value in zip(tags, violation.tolist()):
            key = f"{prefix}:{tag.family}"
            residuals[key] = max(residuals[key], value)

    if problem.a_eq.shape[0]:
        record("eq", problem.eq_tags, np.abs(problem.a_eq @ x - problem.b_eq))
    if problem.a_ineq.shape[0]:
        activity = problem.a_ineq @ x
        violation = np.maximum(
            np.maximum(problem.ineq_lower - activity, activity - problem.ineq_upper), 0.0
        )
        record("ineq", problem.ineq_tags, violation)

    bound_violation = np.maximum(np.maximum(problem.lower - x, x - problem.upper), 0.0)
    if problem.index is not None:
        for family in problem.index.families:
            chunk = bound_violation[family.offset : family.stop]
            residuals[f"bounds:{family.name}"] = float(chunk.max(initial=0.0))
        tail = bound_violation[problem.index.total :]
        if tail.size:
            residuals["bounds:auxiliary"] = float(tail.max())
    else:
        residuals["bounds"] = float(bound_violation.max(initial=0.0))

    if problem.has_binaries:
        fractional = np.abs(x[problem.binary] - np.round(x[problem.binary]))
        residuals["integrality"] = float(fractional.max(initial=0.0))

    for constraint in problem.quadratic_constraints:
        key = f"quadratic:{constraint.tag.split(':')[0]}"
        violation = max(constraint.value(x) - constraint.rhs, 0.0)
        residuals[key] = max(residuals.get(key, 0.0), violation)

    report = AuditReport(dict(residuals), tol)
    for family, value in report.violations.items():
        logger.warning("Audit residual over tolerance: %s = %.3g", family, value)
    return report
