"""Tests for omtepf.scenarios.heuristic."""

from __future__ import annotations

import numpy as np
import pytest

from omtepf.exceptions import HeuristicConflictError
from omtepf.scenarios.heuristic import ChargingQueueState, charging_heuristic, check_caps
from omtepf.ten.builder import build_mini
from omtepf.ten.taxonomy import Family
from tests.utils import commute_schedule


def test_queue_is_first_come_first_served() -> None:
    queue = ChargingQueueState("work", capacity=1)
    for ev in [2, 0, 1, 0]:
        queue.request(ev)
    assert list(queue.waiting) == [2, 0, 1]
    assert queue.admit(5, 2) == [2]
    assert queue.charging == {2: 7}
    assert not queue.free()
    assert queue.release(6) == []
    assert queue.release(7) == [2]
    assert queue.admit(7, 2) == [0]
    assert list(queue.waiting) == [1]


def test_queue_withdraw_and_extend() -> None:
    queue = ChargingQueueState("work", capacity=2)
    queue.request(0)
    queue.request(1)
    queue.withdraw(1)
    assert queue.admit(1, 1) == [0]
    queue.extend(0, 3)
    assert queue.release(2) == []
    assert queue.occupancy == 1


def test_unlimited_station() -> None:
    queue = ChargingQueueState("home")
    for ev in range(5):
        queue.request(ev)
    assert queue.admit(1, 1) == [0, 1, 2, 3, 4]
    assert queue.free()


def test_full_batteries_never_charge() -> None:
    model = build_mini()
    schedule = commute_schedule(model)
    outcome = charging_heuristic(model, schedule, 1, 2, soc=np.array([18.0, 18.0]))
    np.testing.assert_array_equal(outcome.schedule.u_minus, schedule.u_minus)
    np.testing.assert_allclose(outcome.soc_end, [16.0, 16.0])


def test_charging_day() -> None:
    model = build_mini()
    schedule = commute_schedule(model)
    outcome = charging_heuristic(model, schedule, 1, model.steps)
    u = outcome.schedule.u_minus

    # vehicle 0 arrives first and takes the single workplace charger
    assert u[2, 36] == 1.0
    assert u[2, 22] == 0.0
    # vehicle 1 waits one step in the queue, then plugs in
    assert outcome.queued_for_charging[3, 1] == 1.0
    assert outcome.queued_for_charging.sum() == 1.0
    assert u[2, 29] == 1.0
    assert u[3, 41] == 1.0
    # both top up at home in the evening, two sessions each
    np.testing.assert_array_equal(u[8:10, 34], [1.0, 1.0])
    np.testing.assert_array_equal(u[8:10, 40], [1.0, 1.0])
    np.testing.assert_allclose(outcome.soc_end, [18.0, 18.0])
    # the input schedule is left untouched
    assert schedule.u_minus[2, 22] == 1.0


def test_check_caps_passes() -> None:
    model = build_mini()
    check_caps(model, commute_schedule(model), 1, model.steps)


def test_check_caps_road_capacity() -> None:
    model = build_mini()
    schedule = commute_schedule(model)
    schedule.fire(30, 2, 1)
    with pytest.raises(HeuristicConflictError, match="road_capacity:1->3 at k=2"):
        check_caps(model, schedule, 1, model.steps)


def test_check_caps_window() -> None:
    model = build_mini()
    schedule = commute_schedule(model)
    schedule.cancel(22, 5, 1)
    schedule.fire(20, 5, 1)
    with pytest.raises(HeuristicConflictError, match="workday_window"):
        check_caps(model, schedule, 1, model.steps)


def test_wireless_trip_keeps_charge() -> None:
    model = build_mini()
    schedule = commute_schedule(model)
    road = model.find(Family.TT, 0, origin=1, destination=3)
    wireless = model.find(Family.CR, 0, origin=1, destination=3)
    outcome = charging_heuristic(model, schedule, 2, 2, soc=np.array([16.0, 18.0]))
    u = outcome.schedule.u_minus
    assert u[1, wireless.index] == 1.0
    assert u[1, road.index] == 0.0
    # the charge bought on the electrified road pays for driving it
    np.testing.assert_allclose(outcome.soc_end, [16.0, 16.0])
