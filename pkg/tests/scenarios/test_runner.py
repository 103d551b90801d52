"""Tests for omtepf.scenarios.runner."""

from __future__ import annotations

import dataclasses
from typing import TYPE_CHECKING

import numpy as np
import pytest

from omtepf.assembler.program import assemble
from omtepf.assembler.variable_index import Q_B, U_MINUS
from omtepf.config import ScenarioConfig, ScenarioKind, SolverOptions
from omtepf.exceptions import AuditError
from omtepf.scenarios.runner import _assemble_result, warm_start_vector
from omtepf.scenarios.schedule import replay_schedule
from omtepf.ten.builder import build_mini
from omtepf.ten.programs import joint_program
from tests.utils import commute_schedule, synthetic_result

if TYPE_CHECKING:
    from omtepf.ten.builder import TENModel


def _flat(model: TENModel) -> np.ndarray:
    return np.ones((model.steps, model.layout.bus_count), dtype=complex)


def test_failed_audit_raises() -> None:
    model = build_mini()
    queued = np.zeros((model.steps + 1, model.ev_count))
    # nobody charges, so the final charge misses its target
    with pytest.raises(AuditError, match="soc_residual=4.0"):
        _assemble_result(
            model,
            ScenarioKind.UNCOORDINATED,
            commute_schedule(model),
            _flat(model),
            queued,
            {},
            SolverOptions(),
        )


def test_reported_markings_are_replayed() -> None:
    model = build_mini()
    schedule = commute_schedule(model)
    trajectory = replay_schedule(model, schedule)
    q_b = trajectory.q_b.copy()
    place = int(model.layout.vehicle_places(0)[0])
    q_b[5, place] += 1.0
    markings = dataclasses.replace(trajectory, q_b=q_b)
    queued = np.zeros((model.steps + 1, model.ev_count))
    with pytest.raises(AuditError, match="replay_residual=1.0"):
        _assemble_result(
            model,
            ScenarioKind.COORDINATED,
            schedule,
            _flat(model),
            queued,
            {},
            SolverOptions(),
            markings,
        )


def test_warm_start_respects_closed_horizon() -> None:
    model = build_mini(ScenarioConfig(scenario=ScenarioKind.COORDINATED))
    problem = assemble(joint_program(model).spec, with_names=False)
    result = synthetic_result(model, commute_schedule(model))
    # the commute parks at home during the last step
    assert result.schedule.u_minus[-1, model.net.durations > 0].any()
    x = warm_start_vector(problem, result, model)
    index = problem.index
    timed = np.flatnonzero(model.net.durations > 0).tolist()
    assert not x[[index.column(U_MINUS, model.steps, t) for t in timed]].any()
    binary = problem.binary
    assert (x[binary] >= problem.lower[binary]).all()
    assert (x[binary] <= problem.upper[binary]).all()
    # the vehicles wait at home for the last marking instead
    vehicle = model.layout.vehicle_places()
    assert index.values(x, Q_B)[-1, vehicle].sum() == model.ev_count
