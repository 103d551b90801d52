"""Runs the uncoordinated and coordinated operating scenarios end to end.

The uncoordinated scenario is a pipeline: the fleet's morning commute is
optimized for the transportation system alone, drivers charge by the charging
heuristic during the day, the evening commute is optimized from the state the
day left behind, the heuristic runs again, and finally the power flow of every
step is solved with the charging demand fixed. The coordinated scenario solves
a single program over the whole nexus.
"""

from __future__ import annotations

import dataclasses
import functools
import logging
from typing import TYPE_CHECKING

import numpy as np

from omtepf.assembler.program import assemble
from omtepf.assembler.variable_index import Q_B, Q_E, Q_SL, U_MINUS, U_PLUS
from omtepf.config import ScenarioKind, SolverOptions
from omtepf.exceptions import AuditError, StageInfeasibleError
from omtepf.plugins.power_flow import V_I, V_R
from omtepf.scenarios.evaluation import (
    audit_scenario,
    cost_breakdown,
    energy_table,
    fleet_metrics,
)
from omtepf.scenarios.heuristic import charging_heuristic
from omtepf.scenarios.result import ScenarioResult
from omtepf.scenarios.schedule import Schedule, Trajectory, replay_schedule
from omtepf.solvers.backend import Backend, solve
from omtepf.solvers.decompose import solve_decomposed
from omtepf.solvers.types import SolveRequest
from omtepf.ten.programs import electric_program, joint_program, step_keys, transport_program
from omtepf.ten.taxonomy import ELECTRIC_FAMILIES, Family

if TYPE_CHECKING:
    from collections.abc import Callable
    from pathlib import Path

    from omtepf.assembler.problem import ProblemMatrices
    from omtepf.solvers.types import SolveResult
    from omtepf.ten.builder import TENModel
    from omtepf.ten.programs import StageProgram

logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class _Runner:
    """Solves the stages of one scenario with shared options."""

    options: SolverOptions
    backend: Backend
    workdir: Path | None

    def solve(
        self,
        name: str,
        stage: StageProgram,
        *,
        decompose: bool = False,
        warm_start: Callable[[ProblemMatrices], np.ndarray] | None = None,
    ) -> tuple[ProblemMatrices, SolveResult]:
        """Assembles and solves one stage.

        Raises:
            StageInfeasibleError: The stage returned no point.
        """
        logger.info("Stage %s: %s", name, stage.spec.label)
        problem = assemble(stage.spec)
        warm = None if warm_start is None else warm_start(problem)
        request = SolveRequest(problem, self.options, warm)
        if self.backend is Backend.EXTERNAL:
            workdir = None if self.workdir is None else self.workdir / name
            result = solve(request, self.backend, workdir)
        elif decompose:
            result = solve_decomposed(request, step_keys(problem.index))
        else:
            result = solve(request)
        logger.info(
            "Stage %s finished: %s, objective %.6g, %.3fs",
            name,
            result.status.value,
            result.objective,
            result.wall_time,
        )
        if not result.has_point:
            raise StageInfeasibleError(name, result.message or result.status.value, result)
        return problem, result


def _voltage(problem: ProblemMatrices, x: np.ndarray) -> np.ndarray:
    index = problem.index
    return index.values(x, V_R) + 1j * index.values(x, V_I)


def _assemble_result(
    model: TENModel,
    kind: ScenarioKind,
    schedule: Schedule,
    voltage: np.ndarray,
    queued: np.ndarray,
    stages: dict[str, SolveResult],
    options: SolverOptions,
    markings: Trajectory | None = None,
) -> ScenarioResult:
    """Evaluates and audits a finished schedule.

    Args:
        markings: Markings and charges reported by a solver; a replay of the
            schedule when omitted.

    Raises:
        AuditError: The markings disagree with a replay of the firings, or the
            result breaks conservation, charge closure or the power flow.
    """
    trajectory = replay_schedule(model, schedule) if markings is None else markings
    lines = model.power_flow.lines
    line_current = schedule.u_minus[:, lines.real] + 1j * schedule.u_minus[:, lines.imag]
    costs = cost_breakdown(model, schedule, trajectory.q_b, voltage)
    audit = audit_scenario(model, schedule, trajectory.q_b, trajectory.q_e, trajectory.soc, voltage)
    if not audit.ok(options.feasibility_tol):
        raise AuditError(f"{kind.value} result fails its audit: {audit}")
    return ScenarioResult(
        kind=kind,
        schedule=schedule,
        q_b=trajectory.q_b,
        q_e=trajectory.q_e,
        soc=trajectory.soc,
        voltage=voltage,
        line_current=line_current,
        costs=costs,
        energy=energy_table(model, schedule, voltage, costs),
        metrics=fleet_metrics(model, trajectory.q_b, trajectory.q_e, queued),
        queued_for_charging=queued,
        stages=stages,
        audit=audit,
    )


def run_uncoordinated(
    model: TENModel,
    options: SolverOptions | None = None,
    backend: Backend = Backend.BUILTIN,
    workdir: Path | None = None,
) -> ScenarioResult:
    """Runs the business-as-usual pipeline.

    Args:
        model: The model; its boundary data are rebuilt for the uncoordinated
            scenario if needed.
        options: Solver options.
        backend: Solver backend of every stage.
        workdir: Working directory of the external backend.

    Raises:
        StageInfeasibleError: A stage returned no point.
        HeuristicConflictError: The charging heuristic broke a capacity.

    Returns:
        The result.
    """
    if model.kind is not ScenarioKind.UNCOORDINATED:
        model = model.with_scenario(ScenarioKind.UNCOORDINATED)
    runner = _Runner(options or SolverOptions(), backend, workdir)
    schedule = Schedule.initial(model)
    queued = np.zeros((model.steps + 1, model.ev_count))
    stages: dict[str, SolveResult] = {}

    if model.ev_count:
        itinerary = model.itineraries[0]
        arrive, leave = itinerary.arrival_at_work, itinerary.departure_from_work

        morning = transport_program(model, 1, arrive + 1)
        problem, outcome = runner.solve("morning-transport", morning)
        stages["morning-transport"] = outcome
        schedule.embed(model, morning, problem.index.values(outcome.x, U_MINUS))
        for it in model.itineraries:
            parking = model.find(Family.TP, it.ev_id, buffer=it.work)
            for k in range(arrive + 1, leave):
                schedule.fire(parking.index, k, parking.duration)

        day = charging_heuristic(model, schedule, 1, leave - 1)
        schedule, queued = day.schedule, queued + day.queued_for_charging
        state = replay_schedule(model, schedule, upto=leave).state(leave)

        evening = transport_program(model, leave, model.steps + 1, state)
        problem, outcome = runner.solve("evening-transport", evening)
        stages["evening-transport"] = outcome
        schedule.embed(model, evening, problem.index.values(outcome.x, U_MINUS))

        night = charging_heuristic(model, schedule, leave, model.steps, state.soc)
        schedule, queued = night.schedule, queued + night.queued_for_charging

    opf = electric_program(model, schedule.u_minus)
    problem, stages["opf"] = runner.solve("opf", opf, decompose=True)
    x = stages["opf"].x
    schedule.embed_continuous(
        opf, problem.index.values(x, U_MINUS), model.transitions(ELECTRIC_FAMILIES)
    )
    result = _assemble_result(
        model,
        ScenarioKind.UNCOORDINATED,
        schedule,
        _voltage(problem, x),
        queued,
        stages,
        runner.options,
    )
    logger.info("Uncoordinated total %.6g (%s)", result.total, result.status.value)
    return result


def warm_start_vector(
    problem: ProblemMatrices, result: ScenarioResult, model: TENModel
) -> np.ndarray:
    """A point of the joint program carrying the markings and firings of a result.

    Timed firings that would complete after K are dropped and the markings
    replayed, since the joint program closes its horizon. Only the binary entries
    matter to the solvers.
    """
    schedule = result.schedule.closed(model.net.durations)
    trajectory = replay_schedule(model, schedule)
    index = problem.index
    x = np.zeros(problem.column_count)
    trajectories = {
        Q_B: trajectory.q_b,
        Q_E: trajectory.q_e,
        U_MINUS: schedule.u_minus,
        U_PLUS: schedule.u_plus,
    }
    for name, values in trajectories.items():
        family = index[name]
        steps = np.arange(family.first_step, family.last_step + 1)
        x[family.grid(steps)] = values[steps - 1]
    return np.where(problem.binary, np.rint(x), x)


def run_coordinated(
    model: TENModel,
    options: SolverOptions | None = None,
    backend: Backend = Backend.BUILTIN,
    workdir: Path | None = None,
    warm_start: ScenarioResult | None = None,
) -> ScenarioResult:
    """Solves the joint program of transportation, charging and power flow.

    The reported markings and charges are the solver's own columns; the audit
    replays the firings against them.

    Args:
        model: The model; its boundary data are rebuilt for the coordinated
            scenario if needed.
        options: Solver options.
        backend: Solver backend.
        workdir: Working directory of the external backend.
        warm_start: A result whose binary decisions seed the incumbent, usually
            the uncoordinated result of the same model.

    Raises:
        StageInfeasibleError: The solver returned no point.
        AuditError: The solver's markings disagree with a replay of its firings.

    Returns:
        The result; its status is LIMIT when the solver stopped at a budget with
        an incumbent.
    """
    if model.kind is not ScenarioKind.COORDINATED:
        model = model.with_scenario(ScenarioKind.COORDINATED)
    runner = _Runner(options or SolverOptions(), backend, workdir)
    joint = joint_program(model)
    warm = None
    if warm_start is not None:
        warm = functools.partial(warm_start_vector, result=warm_start, model=model)
    problem, outcome = runner.solve("joint", joint, warm_start=warm)

    index = problem.index
    x = np.where(problem.binary, np.rint(outcome.x), outcome.x)
    schedule = Schedule(index.values(x, U_MINUS).copy(), index.values(x, U_PLUS).copy())
    markings = Trajectory(
        q_b=index.values(x, Q_B).copy(),
        q_e=index.values(x, Q_E).copy(),
        soc=index.values(x, Q_SL).copy(),
    )

    queued = np.zeros((model.steps + 1, model.ev_count))
    result = _assemble_result(
        model,
        ScenarioKind.COORDINATED,
        schedule,
        _voltage(problem, x),
        queued,
        {"joint": outcome},
        runner.options,
        markings,
    )
    logger.info("Coordinated total %.6g (%s)", result.total, result.status.value)
    return result
