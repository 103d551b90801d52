"""Test utilities."""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np
from scipy import sparse

from omtepf.assembler.boundary import BoundaryData, SyncMatrix
from omtepf.assembler.capacity import CapacitySpec
from omtepf.assembler.families import LinearCost
from omtepf.assembler.problem import ProblemMatrices, RowTag
from omtepf.assembler.program import ProgramSpec
from omtepf.assembler.variable_index import Q_B
from omtepf.petri.nets import EngineeringSystemNet
from omtepf.scenarios.evaluation import (
    audit_scenario,
    cost_breakdown,
    energy_table,
    fleet_metrics,
)
from omtepf.scenarios.result import ScenarioResult
from omtepf.scenarios.schedule import Schedule, replay_schedule
from omtepf.solvers.types import SolveResult, SolveStatus
from omtepf.ten.taxonomy import Family

if TYPE_CHECKING:
    from collections.abc import Sequence

    from omtepf.assembler.problem import QuadraticConstraint, SquaredNormTerm
    from omtepf.ten.builder import TENModel


def make_problem(
    c: Sequence[float],
    a_eq: Sequence[Sequence[float]] = (),
    b_eq: Sequence[float] = (),
    a_ineq: Sequence[Sequence[float]] = (),
    ineq_upper: Sequence[float] = (),
    lower: Sequence[float] | None = None,
    upper: Sequence[float] | None = None,
    binary: Sequence[bool] | None = None,
    norm_terms: Sequence[SquaredNormTerm] = (),
    quadratic_constraints: Sequence[QuadraticConstraint] = (),
) -> ProblemMatrices:
    """Builds a program without a variable index from dense data.

    Inequality rows are one-sided, a_ineq x <= ineq_upper.
    """
    n = len(c)
    eq = np.asarray(a_eq, dtype=float).reshape(-1, n)
    ineq = np.asarray(a_ineq, dtype=float).reshape(-1, n)
    return ProblemMatrices(
        index=None,
        binary=np.zeros(n, dtype=bool) if binary is None else np.asarray(binary, dtype=bool),
        a_eq=sparse.csr_matrix(eq),
        b_eq=np.asarray(b_eq, dtype=float),
        eq_tags=tuple(RowTag("eq_row", 1, i) for i in range(eq.shape[0])),
        a_ineq=sparse.csr_matrix(ineq),
        ineq_lower=np.full(ineq.shape[0], -np.inf),
        ineq_upper=np.asarray(ineq_upper, dtype=float),
        ineq_tags=tuple(RowTag("ineq_row", 1, i) for i in range(ineq.shape[0])),
        lower=np.zeros(n) if lower is None else np.asarray(lower, dtype=float),
        upper=np.full(n, np.inf) if upper is None else np.asarray(upper, dtype=float),
        c=np.asarray(c, dtype=float),
        norm_terms=tuple(norm_terms),
        quadratic_constraints=tuple(quadratic_constraints),
    )


def move_net(binary: bool = False) -> EngineeringSystemNet:
    """One token moving from place 0 to place 1 along a one-step transition."""
    return EngineeringSystemNet.from_entries(
        2,
        1,
        plus=[(1, 0, 1.0)],
        minus=[(0, 0, 1.0)],
        durations=[1],
        binary_places=[binary, binary],
        binary_transitions=[binary],
    )


def move_spec(horizon: int = 2, binary: bool = False) -> ProgramSpec:
    """A program rewarding the token for ending in place 1."""
    net = move_net(binary)
    return ProgramSpec(
        net=net,
        operand_nets=(),
        horizon=horizon,
        boundary=BoundaryData((), (), np.array([1.0, 0.0]), np.zeros(1), np.zeros(0)),
        sync=SyncMatrix.from_entries(0, 1, []),
        capacity=CapacitySpec.default(net),
        costs=(
            LinearCost(
                Q_B,
                np.array([0.0, -1.0]),
                "reward",
                first_step=horizon + 1,
                last_step=horizon + 1,
            ),
        ),
        label="move",
    )


def commute_schedule(model: TENModel) -> Schedule:
    """Both vehicles of the mini model drive to work, park there all day and drive home.

    No vehicle charges, so the schedule ends with both batteries 4 units short.
    """
    schedule = Schedule.initial(model)
    for ev, home in enumerate(model.model_file.itineraries.homes[: model.ev_count]):
        work = model.model_file.itineraries.work
        plan = [(model.find(Family.TP, ev, buffer=home), 1)]
        plan.append((model.find(Family.TT, ev, origin=home, destination=work), 2))
        plan += [(model.find(Family.TP, ev, buffer=work), k) for k in range(3, 8)]
        plan.append((model.find(Family.TT, ev, origin=work, destination=home), 8))
        plan += [(model.find(Family.TP, ev, buffer=home), k) for k in range(9, model.steps + 1)]
        for capability, k in plan:
            schedule.fire(capability.index, k, capability.duration)
    return schedule


def synthetic_result(model: TENModel, schedule: Schedule) -> ScenarioResult:
    """A result of a schedule under flat unit voltages, without solving anything."""
    trajectory = replay_schedule(model, schedule)
    voltage = np.ones((model.steps, model.layout.bus_count), dtype=complex)
    queued = np.zeros((model.steps + 1, model.ev_count))
    costs = cost_breakdown(model, schedule, trajectory.q_b, voltage)
    return ScenarioResult(
        kind=model.kind,
        schedule=schedule,
        q_b=trajectory.q_b,
        q_e=trajectory.q_e,
        soc=trajectory.soc,
        voltage=voltage,
        line_current=np.zeros((model.steps, len(model.model_file.lines)), dtype=complex),
        costs=costs,
        energy=energy_table(model, schedule, voltage, costs),
        metrics=fleet_metrics(model, trajectory.q_b, trajectory.q_e, queued),
        queued_for_charging=queued,
        stages={"opf": SolveResult(SolveStatus.OPTIMAL, np.zeros(1), 0.0)},
        audit=audit_scenario(
            model, schedule, trajectory.q_b, trajectory.q_e, trajectory.soc, voltage
        ),
    )
