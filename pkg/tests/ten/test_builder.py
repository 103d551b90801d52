"""Tests for omtepf.ten.builder."""

from __future__ import annotations

import numpy as np
import pytest

from omtepf.assembler.variable_index import Q_E, U_MINUS
from omtepf.config import ScenarioConfig, ScenarioKind
from omtepf.exceptions import ConfigurationError
from omtepf.petri.validation import validate_net
from omtepf.ten.builder import (
    Itinerary,
    Layout,
    build_mini,
    build_model,
    build_symmetrica,
    make_itineraries,
)
from omtepf.ten.clock import Horizon, TimeWindow
from omtepf.ten.model_file import load_model_file
from omtepf.ten.taxonomy import (
    CHARGING_FAMILIES,
    ELECTRIC_FAMILIES,
    TRANSPORT_FAMILIES,
    BufferRole,
    Facility,
    Family,
    Part,
    TENBuffer,
)


def _layout() -> Layout:
    facilities = frozenset({Facility.BUS})
    return Layout(
        (
            TENBuffer(1, BufferRole.NEIGHBORHOOD, facilities),
            TENBuffer(3, BufferRole.COMMERCIAL_CENTER, facilities),
        ),
        ev_count=2,
    )


def test_layout() -> None:
    layout = _layout()
    assert layout.place_count == 8
    assert layout.electric_place(3, Part.REAL) == 1
    assert layout.electric_place(1, Part.IMAG) == 2
    assert layout.vehicle_place(1, 3) == 7
    np.testing.assert_array_equal(layout.vehicle_places(0), [4, 5])
    np.testing.assert_array_equal(layout.vehicle_places(), [4, 5, 6, 7])
    assert layout.place_names()[:4] == ["I_R@1", "I_R@3", "I_I@1", "I_I@3"]
    with pytest.raises(ConfigurationError, match="Unknown buffer 2"):
        layout.position(2)


def test_itineraries() -> None:
    model_file = load_model_file("mini")
    horizon = Horizon.from_clock("06:00", "18:00", 60)
    (first, second) = make_itineraries(model_file.itineraries, horizon, 2)
    assert (first.home, second.home, first.work) == (1, 2, 3)
    assert (first.arrival_at_work, first.departure_from_work, first.arrival_at_home) == (4, 8, 10)
    assert first.night == TimeWindow("night", 10, 13)


def test_itinerary_deadlines_outside_horizon() -> None:
    model_file = load_model_file("mini")
    horizon = Horizon.from_clock("06:00", "18:00", 60).truncate(8)
    with pytest.raises(ConfigurationError, match="outside"):
        make_itineraries(model_file.itineraries, horizon, 1)


def test_itinerary_gap() -> None:
    with pytest.raises(ConfigurationError, match="does not start"):
        Itinerary(
            ev_id=0,
            home=1,
            work=3,
            morning=TimeWindow("morning", 1, 3),
            workday=TimeWindow("workday", 4, 6),
            evening=TimeWindow("evening", 6, 8),
            night=TimeWindow("night", 8, 10),
        )


def test_mini_counts() -> None:
    model = build_mini()
    assert model.steps == 12
    assert model.ev_count == 2
    assert model.net.place_count == 16
    assert model.net.transition_count == 44
    assert model.transitions(ELECTRIC_FAMILIES).size == 20
    assert model.transitions(TRANSPORT_FAMILIES).size == 14
    assert model.transitions(CHARGING_FAMILIES).size == 10
    assert len(model.operand_nets) == 2
    assert validate_net(model.net).ok


def test_symmetrica_counts() -> None:
    model = build_symmetrica()
    assert model.steps == 56
    assert model.ev_count == 32
    assert model.net.m_plus.shape == (884, 4040)
    assert model.transitions(ELECTRIC_FAMILIES).size == 136
    assert model.transitions([Family.EGS]).size == 34
    assert model.transitions([Family.EGC]).size == 2
    assert model.transitions([Family.EDS]).size == 50
    assert model.transitions([Family.ET]).size == 50
    assert model.transitions(TRANSPORT_FAMILIES).size == 3104
    assert model.transitions([Family.TP]).size == 544
    assert model.transitions([Family.TT]).size == 2560
    assert model.transitions(CHARGING_FAMILIES).size == 800
    assert len(model.model_file.roads) == 40
    assert model.power_flow.lines.real.size == 25
    assert model.power_flow.loads.real.size == 25
    assert model.power_flow.solar.real.size == 17
    assert len(model.operand_nets) == 32
    assert all(net.capacity == 18.0 for net in model.operand_nets)
    assert validate_net(model.net).ok


def test_symmetrica_first_line() -> None:
    lines = build_symmetrica().power_flow.lines
    assert lines.conductance[0] == pytest.approx(46.5)
    assert lines.susceptance[0] == pytest.approx(-15.8)


def test_mini_capability_order() -> None:
    model = build_mini()
    assert model.capabilities[0].name == "E_EGS[R:1]"
    assert model.capabilities[7].name == "E_ET[R:4->3]"
    assert model.find(Family.TP, 0, buffer=1).index == 20
    assert model.find(Family.TT, 0, origin=1, destination=3).index == 23
    assert model.find(Family.TP, 1, buffer=2).index == 28
    assert model.find(Family.CW_HOME, 0, buffer=1).index == 34
    assert model.find(Family.CW_WORK, 0, buffer=3).index == 36
    assert model.find(Family.CR, 1, origin=3, destination=1).index == 43
    np.testing.assert_array_equal(model.transitions([Family.TP], ev=1), [27, 28, 29])


def test_find_missing() -> None:
    with pytest.raises(KeyError, match="E_CW_work"):
        build_mini().find(Family.CW_WORK, 0, buffer=1)


def test_charging_draw_entries() -> None:
    model = build_mini()
    work = model.find(Family.CW_WORK, 0, buffer=3)
    assert work.draw == complex(1.8, 0.88)
    real = model.layout.electric_place(3, Part.REAL)
    imag = model.layout.electric_place(3, Part.IMAG)
    assert model.net.m_minus[real, work.index] == pytest.approx(1.8)
    assert model.net.m_minus[imag, work.index] == pytest.approx(0.88)
    park = model.layout.vehicle_place(0, 3)
    assert model.net.m_minus[park, work.index] == 1.0
    assert model.net.m_plus[park, work.index] == 1.0


def test_scaled_charging_draws() -> None:
    model = build_symmetrica()
    assert model.model_file.capabilities.draw_scale == 0.1
    work = model.find(Family.CW_WORK, 0, buffer=17)
    assert work.draw == pytest.approx(complex(0.18, 0.088))
    wireless = model.find(Family.CR, 0, origin=19, destination=17)
    assert wireless.draw == pytest.approx(complex(0.36, 0.176))
    real = model.layout.electric_place(19, Part.REAL)
    assert model.net.m_minus[real, wireless.index] == pytest.approx(0.36)
    # the charge bought per firing does not scale with the draw
    assert work.rate == 2.0


def test_sync_rates() -> None:
    model = build_mini()
    sync = model.sync.lambda_minus
    assert sync.shape == (6, 44)
    # rows are (charge, hold, discharge) per vehicle
    assert sync[1, 20] == 1.0
    assert sync[2, 23] == 2.0
    assert sync[0, 34] == 1.0
    assert sync[0, 36] == 2.0
    assert sync[3, 39] == 1.0
    # a wireless trip buys charge and spends it on the road
    wireless = model.find(Family.CR, 0, origin=1, destination=3)
    assert sync[0, wireless.index] == 2.0
    assert sync[2, wireless.index] == 2.0
    assert wireless.soc_change == 0.0


def test_capacity() -> None:
    model = build_mini()
    capacity = model.capacity
    np.testing.assert_array_equal(capacity.place_upper[:8], np.zeros(8))
    assert capacity.firing_lower[10] == -np.inf
    assert capacity.firing_upper[3] == np.inf
    # vehicle 0 never parks or charges at the other neighborhood
    assert capacity.firing_upper[21] == 0.0
    assert capacity.firing_upper[35] == 0.0
    assert capacity.firing_upper[22] == 1.0
    tags = [cap.tag for cap in capacity.sum_caps]
    assert tags == [
        "road_capacity:1->3",
        "road_capacity:3->1",
        "road_capacity:2->3",
        "road_capacity:3->2",
        "work_lot",
        "work_chargers",
    ]
    np.testing.assert_array_equal(capacity.sum_caps[0].transitions, [23, 30, 37, 42])
    assert capacity.sum_caps[-1].upper == 1.0
    assert len(capacity.time_caps) == 8


@pytest.mark.parametrize(
    ("kind", "pins", "sum_pins"),
    [(ScenarioKind.UNCOORDINATED, 82, 0), (ScenarioKind.COORDINATED, 74, 10)],
)
def test_boundary(kind: ScenarioKind, pins: int, sum_pins: int) -> None:
    model = build_mini().with_scenario(kind)
    boundary = model.boundary
    assert model.kind is kind
    assert len(boundary.pins) == pins
    assert len(boundary.sum_pins) == sum_pins
    assert np.flatnonzero(boundary.initial_q_e).tolist() == [20, 28]
    np.testing.assert_array_equal(boundary.initial_soc, [18.0, 18.0])
    np.testing.assert_array_equal(boundary.final_soc, [18.0, 18.0])


def test_uncoordinated_arrival_pins() -> None:
    boundary = build_mini().boundary
    arrivals = {(p.family, p.k, p.element) for p in boundary.pins if p.tag == "work_arrival"}
    assert arrivals == {(Q_E, 4, 22), (U_MINUS, 4, 22), (Q_E, 4, 29), (U_MINUS, 4, 29)}


def test_coordinated_departure_pins() -> None:
    boundary = build_mini(ScenarioConfig(scenario=ScenarioKind.COORDINATED)).boundary
    (departure, _) = [p for p in boundary.sum_pins if p.tag == "work_departure"]
    assert departure.k == 8
    assert departure.terms == ((Q_E, 22, 1.0), (Q_E, 36, 1.0))


def test_solar_pins_follow_profile() -> None:
    model = build_mini()
    solar = [p for p in model.boundary.pins if p.tag == "solar_profile"]
    assert len(solar) == 2 * 3 * model.steps
    current = model.power_flow.solar.current
    first = next(p for p in solar if p.k == 6 and p.element == 0)
    assert first.value == pytest.approx(current[5, 0].real)


def test_single_vehicle() -> None:
    model = build_mini(ScenarioConfig(ev_count=1))
    assert model.net.place_count == 12
    assert model.net.transition_count == 20 + 7 + 5


def test_too_many_vehicles() -> None:
    with pytest.raises(ConfigurationError, match="itineraries for 2 vehicles"):
        build_mini(ScenarioConfig(ev_count=3))


def test_truncated_clock() -> None:
    model = build_mini(ScenarioConfig(step_minutes=30))
    assert model.steps == 24
    assert model.itineraries[0].arrival_at_work == 7


def test_bad_generator_bus() -> None:
    model_file = load_model_file("mini")
    broken = model_file.model_copy(
        update={"generator": model_file.generator.model_copy(update={"bus": 3})}
    )
    with pytest.raises(ConfigurationError, match="generator bus 3"):
        build_model(broken)
