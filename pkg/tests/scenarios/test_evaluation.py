"""Tests for omtepf.scenarios.evaluation."""

from __future__ import annotations

import numpy as np
import pytest

from omtepf.config import ScenarioConfig
from omtepf.scenarios.evaluation import (
    CostBreakdown,
    EnergyRow,
    Metrics,
    ScenarioAudit,
    audit_scenario,
    cost_breakdown,
    fleet_metrics,
    vehicle_queue,
)
from omtepf.scenarios.schedule import replay_schedule
from omtepf.ten.builder import build_mini
from omtepf.ten.taxonomy import Family
from tests.utils import commute_schedule


def test_cost_breakdown_total() -> None:
    costs = CostBreakdown(1.0, 2.0, 3.0, 4.0, -5.0, 6.0)
    assert costs.total == 11.0
    assert list(costs.as_dict()) == ["Z_TT", "Z_TQ", "Z_EGC", "Z_EGS", "Z_EC", "Z_EDS"]
    assert costs.as_dict()["Z_EC"] == -5.0


@pytest.mark.parametrize(("cost", "energy", "unit"), [(3.0, 1.5, 2.0), (3.0, 0.0, 0.0), (1.0, -1.0, 0.0)])
def test_unit_cost(cost: float, energy: float, unit: float) -> None:
    assert EnergyRow("solar", cost, energy).unit_cost == unit


def test_costs_of_commute() -> None:
    model = build_mini()
    schedule = commute_schedule(model)
    trajectory = replay_schedule(model, schedule)
    voltage = np.ones((model.steps, 4), dtype=complex)
    costs = cost_breakdown(model, schedule, trajectory.q_b, voltage)
    # four road trips, nobody waiting, nobody charging, generator idle
    assert costs.transportation == pytest.approx(0.2)
    assert costs.queuing == 0.0
    assert costs.charging == 0.0
    assert costs.generation == 0.0
    solar = model.power_flow.solar.current[: model.steps]
    assert costs.solar == pytest.approx(0.0852 * float((np.abs(solar) ** 2).sum()))


def test_wireless_trip_is_a_road_trip() -> None:
    model = build_mini()
    schedule = commute_schedule(model)
    road = model.find(Family.TT, 0, origin=3, destination=1)
    wireless = model.find(Family.CR, 0, origin=3, destination=1)
    schedule.cancel(road.index, 8, road.duration)
    schedule.fire(wireless.index, 8, wireless.duration)
    trajectory = replay_schedule(model, schedule)
    voltage = np.ones((model.steps, 4), dtype=complex)
    costs = cost_breakdown(model, schedule, trajectory.q_b, voltage)
    assert costs.transportation == pytest.approx(0.2)
    assert costs.charging == pytest.approx(-0.05)


def test_vehicle_queue() -> None:
    model = build_mini()
    q_b = np.zeros((13, 16))
    q_b[3, [8, 14]] = 1.0
    q_b[3, 0] = 5.0
    np.testing.assert_array_equal(vehicle_queue(model, q_b)[2:5], [0.0, 2.0, 0.0])


def test_fleet_metrics_of_commute() -> None:
    model = build_mini()
    trajectory = replay_schedule(model, commute_schedule(model))
    metrics = fleet_metrics(model, trajectory.q_b, trajectory.q_e, np.zeros((13, 2)))
    assert metrics.quality_of_service == 1.0
    assert metrics.fleet_utilization == pytest.approx(4 / 26)
    assert metrics.fleet_availability == 1.0
    assert metrics.effective_utilization == pytest.approx(4 / 26)
    assert metrics.queue_peak == 0
    assert metrics.window_queues == {"morning": 0, "workday": 0, "evening": 0, "night": 0}


def test_fleet_metrics_with_queues() -> None:
    model = build_mini()
    q_b = np.zeros((13, 16))
    q_b[4, 10] = 1.0
    q_e = np.zeros((13, 44))
    queued = np.zeros((13, 2))
    queued[5, 1] = 1.0
    metrics = fleet_metrics(model, q_b, q_e, queued)
    assert metrics.quality_of_service == pytest.approx(1 - 1 / 26)
    assert metrics.fleet_availability == pytest.approx(1 - 1 / 26)
    assert metrics.queue_peak == 1
    assert metrics.window_queues["workday"] == 1


def test_queue_peak_skips_final_marking() -> None:
    model = build_mini()
    q_b = np.zeros((13, 16))
    # every vehicle stands in a place once the closed horizon ends
    q_b[12, [8, 14]] = 1.0
    q_b[6, 10] = 1.0
    metrics = fleet_metrics(model, q_b, np.zeros((13, 44)), np.zeros((13, 2)))
    assert metrics.queue_peak == 1


def test_fleet_metrics_without_vehicles() -> None:
    model = build_mini(ScenarioConfig(ev_count=0))
    metrics = fleet_metrics(model, np.zeros((13, 8)), np.zeros((13, 20)), np.zeros((13, 0)))
    assert metrics == Metrics(1.0, 0.0, 1.0, 0.0, 0, {})


def test_audit_of_commute() -> None:
    model = build_mini()
    schedule = commute_schedule(model)
    trajectory = replay_schedule(model, schedule)
    audit = audit_scenario(
        model,
        schedule,
        trajectory.q_b,
        trajectory.q_e,
        trajectory.soc,
        np.ones((model.steps, 4), dtype=complex),
    )
    assert audit.replay_residual == 0.0
    assert audit.conservation == pytest.approx(0.0)
    assert audit.soc_drift == 0.0
    # nobody charged, so both batteries miss their target by two trips
    assert audit.soc_residual == pytest.approx(4.0)
    assert not audit.ok()


def test_audit_of_tampered_markings() -> None:
    model = build_mini()
    schedule = commute_schedule(model)
    trajectory = replay_schedule(model, schedule)
    q_e = trajectory.q_e.copy()
    moving = int(np.flatnonzero(model.net.binary_transitions)[0])
    q_e[3, moving] = 1.0 - q_e[3, moving]
    soc = trajectory.soc + 0.5
    audit = audit_scenario(
        model, schedule, trajectory.q_b, q_e, soc, np.ones((model.steps, 4), dtype=complex)
    )
    assert audit.replay_residual == 1.0
    assert audit.soc_drift == pytest.approx(0.5)


@pytest.mark.parametrize(
    ("audit", "ok"),
    [
        (ScenarioAudit(0.0, 0.0, 0.0, 0.0, 5e-5), True),
        (ScenarioAudit(0.0, 0.0, 0.0, 0.0, 5e-3), False),
        (ScenarioAudit(0.0, 2e-6, 0.0, 0.0, 0.0), False),
        (ScenarioAudit(0.0, 0.0, 0.0, 0.0, 0.0, soc_drift=5e-5), True),
        (ScenarioAudit(0.0, 0.0, 0.0, 0.0, 0.0, soc_drift=0.5), False),
    ],
)
def test_audit_ok(audit: ScenarioAudit, ok: bool) -> None:
    assert audit.ok() is ok
