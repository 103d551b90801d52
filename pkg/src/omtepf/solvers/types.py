"""Requests and results of the solve engine."""

from __future__ import annotations

import dataclasses
import enum
from typing import TYPE_CHECKING

import numpy as np

from omtepf.config import SolverOptions

if TYPE_CHECKING:
    from omtepf.assembler.problem import ProblemMatrices


class SolveStatus(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    LIMIT = "limit"


@dataclasses.dataclass(frozen=True, eq=False)
class SolveRequest:
    """A program together with the options to solve it.

    Args:
        problem: The program.
        options: Tolerances and budgets.
        warm_start: Optional full-length point whose binaries seed the incumbent.

    Raises:
        ValueError: A binary column has bounds outside [0, 1], or the warm start has
            the wrong length.
    """

    problem: ProblemMatrices
    options: SolverOptions = dataclasses.field(default_factory=SolverOptions)
    warm_start: np.ndarray | None = None

    def __post_init__(self) -> None:
        binary = self.problem.binary
        if np.any(self.problem.lower[binary] < 0) or np.any(self.problem.upper[binary] > 1):
            raise ValueError("Binary columns must have bounds within [0, 1]")
        if self.warm_start is not None and np.shape(self.warm_start) != (
            self.problem.column_count,
        ):
            raise ValueError(
                f"Warm start has shape {np.shape(self.warm_start)}, "
                f"expected ({self.problem.column_count},)"
            )

    def replace(self, **changes: object) -> SolveRequest:
        return dataclasses.replace(self, **changes)


@dataclasses.dataclass(frozen=True, eq=False)
class SolveResult:
    """Outcome of one solve.

    `x` is None when no point is available (infeasible, or a limit without
    incumbent). `residuals` holds the largest violation per constraint family.
    """

    status: SolveStatus
    x: np.ndarray | None
    objective: float
    residuals: dict[str, float] = dataclasses.field(default_factory=dict)
    node_count: int = 0
    wall_time: float = 0.0
    message: str = ""
    duals: dict[str, np.ndarray] | None = None
    incumbent_trace: tuple[float, ...] = ()

    @property
    def optimal(self) -> bool:
        return self.status is SolveStatus.OPTIMAL

    @property
    def has_point(self) -> bool:
        return self.x is not None

    def replace(self, **changes: object) -> SolveResult:
        return dataclasses.replace(self, **changes)

    @classmethod
    def failed(cls, status: SolveStatus, message: str, wall_time: float = 0.0) -> SolveResult:
        return cls(status=status, x=None, objective=np.nan, message=message, wall_time=wall_time)
