"""Solve engine: LP, branch-and-bound, interior point and external solvers."""

# ruff: noqa: PLC0414

from omtepf.solvers.audit import AuditReport as AuditReport
from omtepf.solvers.audit import audit as audit
from omtepf.solvers.backend import Backend as Backend
from omtepf.solvers.backend import solve as solve
from omtepf.solvers.branch_and_bound import solve_mi_convex as solve_mi_convex
from omtepf.solvers.branch_and_bound import solve_milp as solve_milp
from omtepf.solvers.decompose import solve_decomposed as solve_decomposed
from omtepf.solvers.external import solve_external as solve_external
from omtepf.solvers.interior_point import solve_convex as solve_convex
from omtepf.solvers.lp import solve_lp as solve_lp
from omtepf.solvers.lp_format import export_model as export_model
from omtepf.solvers.lp_format import import_result as import_result
from omtepf.solvers.lp_format import read_model as read_model
from omtepf.solvers.lp_format import write_solution as write_solution
from omtepf.solvers.types import SolveRequest as SolveRequest
from omtepf.solvers.types import SolveResult as SolveResult
from omtepf.solvers.types import SolveStatus as SolveStatus
