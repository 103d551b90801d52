"""Chooses the solver that fits a program."""

from __future__ import annotations

import enum
from typing import TYPE_CHECKING

from omtepf.solvers.branch_and_bound import solve_mi_convex, solve_milp
from omtepf.solvers.external import solve_external
from omtepf.solvers.interior_point import solve_convex
from omtepf.solvers.lp import solve_lp

if TYPE_CHECKING:
    from pathlib import Path

    from omtepf.solvers.types import SolveRequest, SolveResult


class Backend(str, enum.Enum):
    BUILTIN = "builtin"
    EXTERNAL = "external"


def solve(
    request: SolveRequest,
    backend: Backend = Backend.BUILTIN,
    workdir: Path | None = None,
) -> SolveResult:
    """Solves a request with the built-in solver matching its structure.

    Linear programs go to `solve_lp` or `solve_milp`, programs with quadratic parts
    to `solve_convex` or `solve_mi_convex`. The external backend exports the program
    instead.

    Raises:
        ValueError: The external backend is chosen without a working directory.
    """
    if backend is Backend.EXTERNAL:
        if workdir is None:
            raise ValueError("The external backend needs a working directory")
        return solve_external(request, workdir)

    problem = request.problem
    if problem.is_linear:
        return solve_milp(request) if problem.has_binaries else solve_lp(request)
    return solve_mi_convex(request) if problem.has_binaries else solve_convex(request)
