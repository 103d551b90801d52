"""Exceptions used in omtepf."""

from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from omtepf.solvers.types import SolveResult


class OmtepfError(Exception):
    """Base class of all omtepf exceptions.

    Subclasses of this exception does not mean incorrect use of the library by the user
    at the interface level. These exceptions inform users that a model, a boundary data
    set or a solve went into something wrong: the nets are inconsistent, the program is
    infeasible, or a returned solution fails its audit.
    These exceptions are usually captured by the frontend functions (e.g., `run_scenario`)
    and by the command line to produce a readable report.
    Errors caused by wrong inputs should raise built-in exceptions.
    """


class StructuralError(OmtepfError):
    """Dimensions or references of nets and programs do not agree.

    Raised for vector/matrix dimension mismatches and for device rows that reference
    variables which were never registered in the variable index.
    """


class InfeasibleFiringError(OmtepfError):
    """A firing drives a binary-kind marking below zero."""


class SocBoundError(OmtepfError):
    """A state of charge leaves [0, capacity]."""


class ConfigurationError(OmtepfError):
    """Configuration or model-file content is inconsistent."""


class InfeasibleBoundaryError(OmtepfError):
    """Boundary pins contradict each other or the variable bounds.

    Detected while the program is assembled, before any solve.
    """


class ConvexityError(OmtepfError):
    """A cost term that must be convex is not."""


class DomainError(OmtepfError):
    """A quantity is requested for a capability family that does not define it."""


class HeuristicConflictError(OmtepfError):
    """The charging heuristic produced a schedule that breaks a capacity."""


class AuditError(OmtepfError):
    """A solution file is malformed or fails the residual audit."""


class StageInfeasibleError(OmtepfError):
    """One stage of a scenario pipeline did not produce a usable solution.

    Args:
        stage: Name of the failing stage (e.g. "evening-transport", "opf-k17").
        result: The solver result of the failing stage, if any.
    """

    def __init__(self, stage: str, message: str, result: SolveResult | None = None) -> None:
        super().__init__(f"[{stage}] {message}")
        self.stage = stage
        self.result = result
