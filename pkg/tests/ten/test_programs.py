"""Tests for omtepf.ten.programs."""

from __future__ import annotations

import numpy as np
import pytest

from omtepf.assembler.program import assemble
from omtepf.assembler.variable_index import Q_B, U_MINUS, index_variables
from omtepf.plugins.power_flow import V_I, V_R
from omtepf.ten.builder import build_mini
from omtepf.ten.programs import (
    StageState,
    cost_terms,
    electric_program,
    joint_program,
    step_keys,
    transport_program,
)
from omtepf.ten.taxonomy import Family


def test_cost_terms() -> None:
    model = build_mini()
    places = np.arange(model.net.place_count)
    transitions = np.arange(model.net.transition_count)
    queue, road, charging = cost_terms(model, places, transitions)
    assert (queue.family, road.family, charging.family) == (Q_B, U_MINUS, U_MINUS)
    np.testing.assert_array_equal(queue.coefficients[:8], np.zeros(8))
    np.testing.assert_array_equal(queue.coefficients[8:], np.full(8, 0.05))
    assert road.coefficients[23] == 0.05
    assert road.coefficients[20] == 0.0
    # charging revenue is a credit proportional to the charge rate
    assert charging.coefficients[34] == pytest.approx(-0.025)
    assert charging.coefficients[36] == pytest.approx(-0.05)
    wireless = model.find(Family.CR, 0, origin=1, destination=3).index
    assert road.coefficients[wireless] == 0.05
    assert charging.coefficients[wireless] == pytest.approx(-0.05)


def test_transport_program() -> None:
    model = build_mini()
    stage = transport_program(model, 1, 4)
    spec = stage.spec
    assert spec.horizon == 3
    assert spec.open_end
    assert spec.net.place_count == 8
    assert spec.net.transition_count == 14
    assert spec.boundary.final_soc is None
    assert [c.tag for c in spec.costs] == ["Z_TQ", "Z_TT"]
    assert spec.label == "transport[1,4]"


def test_transport_program_from_state() -> None:
    model = build_mini()
    state = StageState(
        q_b=np.zeros(model.net.place_count),
        q_e=model.boundary.initial_q_e,
        soc=np.array([12.0, 16.0]),
    )
    spec = transport_program(model, 8, 10, state).spec
    assert spec.horizon == 2
    np.testing.assert_array_equal(spec.boundary.initial_soc, [12.0, 16.0])
    np.testing.assert_array_equal(np.flatnonzero(spec.boundary.initial_q_e), [0, 8])


def test_transport_program_to_horizon_end() -> None:
    model = build_mini()
    spec = transport_program(model, 9, model.steps + 1).spec
    assert spec.horizon == 4
    assert not spec.open_end
    problem = assemble(spec, with_names=False)
    trips = np.flatnonzero(spec.net.durations > 0)
    last = [problem.index.column(U_MINUS, spec.horizon, t) for t in trips.tolist()]
    assert not problem.upper[last].any()


def test_electric_program() -> None:
    model = build_mini()
    charging = np.zeros((model.steps, model.net.transition_count))
    spec = electric_program(model, charging).spec
    assert spec.net.place_count == 8
    assert spec.net.transition_count == 30
    assert not spec.net.binary_transitions.any()
    assert spec.device_vars == {V_R: 4, V_I: 4}
    schedule = [p for p in spec.boundary.pins if p.tag == "charging_schedule"]
    assert len(schedule) == 10 * model.steps
    assert all(p.value == 0.0 for p in schedule)


def test_joint_program() -> None:
    model = build_mini()
    stage = joint_program(model)
    assert stage.spec.net is model.net
    assert stage.spec.horizon == 12
    assert [c.tag for c in stage.spec.costs] == ["Z_TQ"]
    assert stage.restriction.reaches_end
    assert not stage.spec.open_end


def test_joint_program_closes_horizon() -> None:
    model = build_mini()
    problem = assemble(joint_program(model).spec, with_names=False)
    index = problem.index
    timed = np.flatnonzero(model.net.durations > 0)
    assert timed.size
    last = [index.column(U_MINUS, model.steps, t) for t in timed.tolist()]
    # a start at K would complete at K + 1 or later
    assert not problem.upper[last].any()


def test_step_keys() -> None:
    spec = transport_program(build_mini(), 1, 4).spec
    index = index_variables(spec.net, spec.operand_nets, spec.horizon)
    keys = step_keys(index)
    assert (keys[: index[U_MINUS].offset] == -1).all()
    u_minus = index[U_MINUS]
    np.testing.assert_array_equal(
        keys[u_minus.offset : u_minus.stop], np.repeat([1, 2, 3], spec.net.transition_count)
    )
