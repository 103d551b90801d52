"""Builds the engineering system net of a transportation-electricity nexus.

Places are laid out as the real current balance of every bus, then the imaginary
current balance of every bus, then one place per (vehicle, buffer) pair, vehicle
major. Transitions are laid out as the real electric capabilities (solar units,
the generator, loads, lines), the same capabilities for the imaginary part, the
transportation capabilities of every vehicle (parking lots, then both directions of
every road), and finally the charging capabilities of every vehicle (home chargers,
the commercial charger, then both directions of every electrified road).
"""

from __future__ import annotations

import dataclasses
import itertools
import logging
from typing import TYPE_CHECKING

import numpy as np

from omtepf.assembler.boundary import BoundaryData, Pin, SumPin, SyncMatrix
from omtepf.assembler.capacity import CapacitySpec, SumCap, TimeCap
from omtepf.assembler.variable_index import Q_E, U_MINUS
from omtepf.config import ScenarioConfig, ScenarioKind
from omtepf.exceptions import ConfigurationError
from omtepf.petri.nets import EngineeringSystemNet, OperandNet
from omtepf.plugins.power_flow import (
    DemandCost,
    GenCost,
    Generators,
    LineParams,
    LoadParams,
    PowerFlowModel,
    SolarUnits,
    VoltageLimits,
)
from omtepf.ten.clock import Horizon, TimeWindow
from omtepf.ten.model_file import load_model_file
from omtepf.ten.profiles import LoadLevels, SolarShape, load_profile, solar_profile
from omtepf.ten.taxonomy import (
    CHARGING_FAMILIES,
    DRIVING_FAMILIES,
    ELECTRIC_FAMILIES,
    TRANSPORT_FAMILIES,
    VEHICLE_FAMILIES,
    BufferRole,
    Capability,
    Facility,
    Family,
    OperandKind,
    Part,
    TENBuffer,
    TENOperand,
    charging_draw,
)

if TYPE_CHECKING:
    from collections.abc import Iterable

    from omtepf.ten.model_file import CapabilitySection, ItinerarySection, ModelFile

logger = logging.getLogger(__name__)

# Operand transition rows of the synchronization matrix.
_CHARGE, _HOLD, _DISCHARGE = 0, 1, 2
_OPERAND_WIDTH = 3


@dataclasses.dataclass(frozen=True)
class Layout:
    """Place numbering of a nexus with every buffer carrying a bus."""

    buffers: tuple[TENBuffer, ...]
    ev_count: int

    @property
    def bus_count(self) -> int:
        return len(self.buffers)

    @property
    def place_count(self) -> int:
        return (2 + self.ev_count) * self.bus_count

    def position(self, buffer: int) -> int:
        for i, b in enumerate(self.buffers):
            if b.id == buffer:
                return i
        raise ConfigurationError(f"Unknown buffer {buffer}")

    def electric_place(self, buffer: int, part: Part) -> int:
        offset = 0 if part is Part.REAL else self.bus_count
        return offset + self.position(buffer)

    def vehicle_place(self, ev: int, buffer: int) -> int:
        return (2 + ev) * self.bus_count + self.position(buffer)

    def electric_places(self) -> np.ndarray:
        return np.arange(2 * self.bus_count)

    def vehicle_places(self, ev: int | None = None) -> np.ndarray:
        if ev is None:
            return np.arange(2 * self.bus_count, self.place_count)
        start = (2 + ev) * self.bus_count
        return np.arange(start, start + self.bus_count)

    def place_names(self) -> list[str]:
        names = [f"I_R@{b.id}" for b in self.buffers] + [f"I_I@{b.id}" for b in self.buffers]
        for ev in range(self.ev_count):
            names += [f"ev{ev}@{b.id}" for b in self.buffers]
        return names


@dataclasses.dataclass(frozen=True)
class Itinerary:
    """Daily plan of one vehicle.

    The four windows are marking ranges that follow each other: the morning
    commute ends when the workday starts, and so on until the end of the horizon.

    Raises:
        ConfigurationError: The windows overlap or leave a gap.
    """

    ev_id: int
    home: int
    work: int
    morning: TimeWindow
    workday: TimeWindow
    evening: TimeWindow
    night: TimeWindow

    def __post_init__(self) -> None:
        windows = self.windows
        for a, b in itertools.combinations(windows, 2):
            if a.overlaps(b):
                raise ConfigurationError(f"Windows {a.name} and {b.name} overlap")
        for a, b in itertools.pairwise(windows):
            if a.last != b.first:
                raise ConfigurationError(f"Window {b.name} does not start where {a.name} ends")

    @property
    def windows(self) -> tuple[TimeWindow, TimeWindow, TimeWindow, TimeWindow]:
        return self.morning, self.workday, self.evening, self.night

    @property
    def arrival_at_work(self) -> int:
        return self.morning.last

    @property
    def departure_from_work(self) -> int:
        return self.evening.first

    @property
    def arrival_at_home(self) -> int:
        return self.evening.last


def make_itineraries(
    section: ItinerarySection, horizon: Horizon, ev_count: int
) -> tuple[Itinerary, ...]:
    """Itineraries of the first `ev_count` vehicles of the model file.

    Raises:
        ConfigurationError: The deadlines are off the step grid, out of order or
            outside the horizon.
    """
    arrive = horizon.step(section.morning_end)
    leave = horizon.step(section.evening_start)
    home = horizon.step(section.evening_end)
    if not 1 < arrive < leave < home <= horizon.steps:
        raise ConfigurationError(
            f"Itinerary deadlines must satisfy 1 < morning_end < evening_start < evening_end <= K; "
            f"got steps {arrive}, {leave}, {home} with K = {horizon.steps}"
        )
    return tuple(
        Itinerary(
            ev_id=ev,
            home=section.homes[ev],
            work=section.work,
            morning=TimeWindow("morning", 1, arrive),
            workday=TimeWindow("workday", arrive, leave),
            evening=TimeWindow("evening", leave, home),
            night=TimeWindow("night", home, horizon.steps + 1),
        )
        for ev in range(ev_count)
    )


@dataclasses.dataclass(frozen=True, eq=False)
class TENModel:
    """A built nexus: the nets, their data and the daily plans of the fleet.

    Args:
        net: The engineering system net.
        operand_nets: State of charge net of every vehicle.
        operands: Current operands followed by the vehicles.
        sync: Coupling of vehicle capabilities to their operand nets.
        boundary: Pins and initial and final conditions of `kind`.
        capacity: Bounds, window caps and shared capacities.
        power_flow: Device data of the distribution network.
        capabilities: One entry per transition, in column order.
        layout: Place numbering.
        itineraries: One per vehicle.
        horizon: Clock of the model.
        model_file: The validated model file the model was built from.
        kind: Scenario the boundary data were built for.
        dt: Step length of the dynamics.
    """

    net: EngineeringSystemNet
    operand_nets: tuple[OperandNet, ...]
    operands: tuple[TENOperand, ...]
    sync: SyncMatrix
    boundary: BoundaryData
    capacity: CapacitySpec
    power_flow: PowerFlowModel
    capabilities: tuple[Capability, ...]
    layout: Layout
    itineraries: tuple[Itinerary, ...]
    horizon: Horizon
    model_file: ModelFile
    kind: ScenarioKind = ScenarioKind.UNCOORDINATED
    dt: float = 1.0

    @property
    def steps(self) -> int:
        return self.horizon.steps

    @property
    def ev_count(self) -> int:
        return self.layout.ev_count

    @property
    def buffers(self) -> tuple[TENBuffer, ...]:
        return self.layout.buffers

    def transitions(self, families: Iterable[Family], ev: int | None = None) -> np.ndarray:
        """Columns of the capabilities of the given families, optionally of one vehicle."""
        wanted = set(families)
        return np.asarray(
            [
                c.index
                for c in self.capabilities
                if c.family in wanted and (ev is None or c.ev == ev)
            ],
            dtype=np.int64,
        )

    def find(
        self,
        family: Family,
        ev: int | None = None,
        *,
        buffer: int | None = None,
        origin: int | None = None,
        destination: int | None = None,
    ) -> Capability:
        """The capability matching every given attribute.

        Raises:
            KeyError: No capability matches.
        """
        for c in self.capabilities:
            if (
                c.family is family
                and c.ev == ev
                and (buffer is None or c.buffer == buffer)
                and (origin is None or c.origin == origin)
                and (destination is None or c.destination == destination)
            ):
                return c
        raise KeyError(f"No {family.value} capability for ev={ev}, buffer={buffer}")

    def with_scenario(self, kind: ScenarioKind) -> TENModel:
        """The same model with the boundary data of another scenario."""
        return dataclasses.replace(
            self, kind=kind, boundary=build_boundary(self, self.itineraries, kind)
        )


def _check_buffers(model_file: ModelFile) -> tuple[TENBuffer, ...]:
    buffers = tuple(
        sorted(
            (TENBuffer(b.id, b.role, frozenset(b.facilities)) for b in model_file.buffers),
            key=lambda b: b.id,
        )
    )
    ids = [b.id for b in buffers]
    if len(set(ids)) != len(ids):
        raise ConfigurationError(f"Duplicate buffer ids: {ids}")
    for b in buffers:
        if not b.has(Facility.BUS):
            raise ConfigurationError(f"Buffer {b.id} has no bus")
    generators = [b.id for b in buffers if b.has(Facility.GENERATOR)]
    if generators != [model_file.generator.bus]:
        raise ConfigurationError(
            f"Exactly the generator bus {model_file.generator.bus} must hold the generator, "
            f"found {generators}"
        )
    known = set(ids)
    endpoints = [(r.a, r.b) for r in model_file.roads]
    endpoints += [(line.from_bus, line.to_bus) for line in model_file.lines]
    for a, b in endpoints:
        if a not in known or b not in known or a == b:
            raise ConfigurationError(f"Invalid connection {a}-{b}")
    return buffers


class _Builder:
    """Accumulates capabilities and incidence entries in column order."""

    def __init__(self, layout: Layout) -> None:
        self.layout = layout
        self.capabilities: list[Capability] = []
        self.plus: list[tuple[int, int, float]] = []
        self.minus: list[tuple[int, int, float]] = []
        self.sync: list[tuple[int, int, float]] = []

    @property
    def next_index(self) -> int:
        return len(self.capabilities)

    def add(
        self,
        capability: Capability,
        plus: Iterable[tuple[int, float]] = (),
        minus: Iterable[tuple[int, float]] = (),
    ) -> Capability:
        t = capability.index
        self.capabilities.append(capability)
        self.plus += [(p, t, w) for p, w in plus if w != 0]
        self.minus += [(p, t, w) for p, w in minus if w != 0]
        return capability

    def electric(self, model_file: ModelFile) -> None:
        layout = self.layout
        for part in Part:
            for b in layout.buffers:
                if b.has(Facility.SOLAR):
                    self.add(
                        Capability(self.next_index, Family.EGS, part=part, buffer=b.id),
                        plus=[(layout.electric_place(b.id, part), 1.0)],
                    )
            bus = model_file.generator.bus
            self.add(
                Capability(self.next_index, Family.EGC, part=part, buffer=bus),
                plus=[(layout.electric_place(bus, part), 1.0)],
            )
            for b in layout.buffers:
                if b.has(Facility.LOAD):
                    self.add(
                        Capability(self.next_index, Family.EDS, part=part, buffer=b.id),
                        minus=[(layout.electric_place(b.id, part), 1.0)],
                    )
            for i, line in enumerate(model_file.lines):
                self.add(
                    Capability(
                        self.next_index,
                        Family.ET,
                        part=part,
                        origin=line.from_bus,
                        destination=line.to_bus,
                        line=i,
                    ),
                    plus=[(layout.electric_place(line.to_bus, part), 1.0)],
                    minus=[(layout.electric_place(line.from_bus, part), 1.0)],
                )

    def transport(self, model_file: ModelFile, ev: int) -> None:
        layout, caps = self.layout, model_file.capabilities
        for b in layout.buffers:
            if b.has(Facility.PARKING):
                place = layout.vehicle_place(ev, b.id)
                cap = self.add(
                    Capability(
                        self.next_index,
                        Family.TP,
                        ev=ev,
                        buffer=b.id,
                        duration=caps.parking_duration,
                    ),
                    plus=[(place, 1.0)],
                    minus=[(place, 1.0)],
                )
                self.sync.append((ev * _OPERAND_WIDTH + _HOLD, cap.index, 1.0))
        for road in model_file.roads:
            for origin, destination in [(road.a, road.b), (road.b, road.a)]:
                cap = self.add(
                    Capability(
                        self.next_index,
                        Family.TT,
                        ev=ev,
                        origin=origin,
                        destination=destination,
                        duration=caps.road_duration,
                        rate=-caps.road_discharge,
                    ),
                    plus=[(layout.vehicle_place(ev, destination), 1.0)],
                    minus=[(layout.vehicle_place(ev, origin), 1.0)],
                )
                self.sync.append((ev * _OPERAND_WIDTH + _DISCHARGE, cap.index, caps.road_discharge))

    def _draw_entries(self, bus: int, draw: complex) -> list[tuple[int, float]]:
        return [
            (self.layout.electric_place(bus, Part.REAL), draw.real),
            (self.layout.electric_place(bus, Part.IMAG), draw.imag),
        ]

    def _charger(self, family: Family, ev: int, bus: int, caps: CapabilitySection) -> None:
        place = self.layout.vehicle_place(ev, bus)
        draw = charging_draw(family) * caps.draw_scale
        rate = caps.home_rate if family is Family.CW_HOME else caps.work_rate
        cap = self.add(
            Capability(
                self.next_index,
                family,
                ev=ev,
                buffer=bus,
                duration=caps.charging_duration,
                rate=rate,
                draw=draw,
            ),
            plus=[(place, 1.0)],
            minus=[(place, 1.0), *self._draw_entries(bus, draw)],
        )
        self.sync.append((ev * _OPERAND_WIDTH + _CHARGE, cap.index, rate))

    def charging(self, model_file: ModelFile, ev: int) -> None:
        layout, caps = self.layout, model_file.capabilities
        for b in layout.buffers:
            if b.has(Facility.HOME_CHARGER):
                self._charger(Family.CW_HOME, ev, b.id, caps)
        for b in layout.buffers:
            if b.has(Facility.COMMERCIAL_CHARGER):
                self._charger(Family.CW_WORK, ev, b.id, caps)
        draw = charging_draw(Family.CR) * caps.draw_scale
        for road in model_file.roads:
            if not road.electrified:
                continue
            for origin, destination in [(road.a, road.b), (road.b, road.a)]:
                cap = self.add(
                    Capability(
                        self.next_index,
                        Family.CR,
                        ev=ev,
                        origin=origin,
                        destination=destination,
                        duration=caps.road_duration,
                        rate=caps.wireless_rate,
                        spent=caps.road_discharge,
                        draw=draw,
                    ),
                    plus=[(layout.vehicle_place(ev, destination), 1.0)],
                    minus=[
                        (layout.vehicle_place(ev, origin), 1.0),
                        *self._draw_entries(origin, draw),
                    ],
                )
                self.sync.append((ev * _OPERAND_WIDTH + _CHARGE, cap.index, caps.wireless_rate))
                self.sync.append((ev * _OPERAND_WIDTH + _DISCHARGE, cap.index, caps.road_discharge))


def _power_flow(
    model_file: ModelFile,
    layout: Layout,
    capabilities: tuple[Capability, ...],
    horizon: Horizon,
) -> PowerFlowModel:
    def columns(family: Family, part: Part) -> list[int]:
        return [c.index for c in capabilities if c.family is family and c.part is part]

    def buses(family: Family) -> np.ndarray:
        ids = [c.buffer for c in capabilities if c.family is family and c.part is Part.REAL]
        return np.asarray([layout.position(b) for b in ids], dtype=np.int64)

    coefficients = model_file.coefficients
    solar = model_file.profiles.solar
    shape = SolarShape(
        peak=solar.peak,
        sunrise=solar.sunrise,
        plateau_start=solar.plateau_start,
        plateau_end=solar.plateau_end,
        sunset=solar.sunset,
        power_factor=solar.power_factor,
    )
    solar_buses = buses(Family.EGS)
    current = np.tile(solar_profile(horizon, shape)[:, None], (1, solar_buses.size))

    levels = LoadLevels(**model_file.profiles.loads.model_dump())
    load_buffers = [b for b in layout.buffers if b.has(Facility.LOAD)]
    admittance = np.zeros((horizon.steps, 0), dtype=complex)
    if load_buffers:
        admittance = np.stack([load_profile(b, horizon, levels) for b in load_buffers], axis=1)

    lines = model_file.lines
    generator = model_file.generator
    return PowerFlowModel(
        bus_count=layout.bus_count,
        bus_real=np.asarray([layout.electric_place(b.id, Part.REAL) for b in layout.buffers]),
        bus_imag=np.asarray([layout.electric_place(b.id, Part.IMAG) for b in layout.buffers]),
        lines=LineParams.create(
            real=columns(Family.ET, Part.REAL),
            imag=columns(Family.ET, Part.IMAG),
            from_bus=[layout.position(line.from_bus) for line in lines],
            to_bus=[layout.position(line.to_bus) for line in lines],
            conductance=[line.conductance for line in lines],
            susceptance=[line.susceptance for line in lines],
            rating=[np.inf if line.rating is None else line.rating for line in lines],
        ),
        loads=LoadParams(
            real=np.asarray(columns(Family.EDS, Part.REAL), dtype=np.int64),
            imag=np.asarray(columns(Family.EDS, Part.IMAG), dtype=np.int64),
            bus=buses(Family.EDS),
            conductance=admittance.real.reshape(horizon.steps, len(load_buffers)),
            susceptance=admittance.imag.reshape(horizon.steps, len(load_buffers)),
        ),
        generators=Generators(
            real=np.asarray(columns(Family.EGC, Part.REAL), dtype=np.int64),
            imag=np.asarray(columns(Family.EGC, Part.IMAG), dtype=np.int64),
            bus=buses(Family.EGC),
            cost=GenCost(**coefficients.generator.model_dump()),
            real_max=generator.real_max,
            imag_max=generator.imag_max,
        ),
        solar=SolarUnits(
            real=np.asarray(columns(Family.EGS, Part.REAL), dtype=np.int64),
            imag=np.asarray(columns(Family.EGS, Part.IMAG), dtype=np.int64),
            bus=solar_buses,
            current=current,
            cost=GenCost(**coefficients.solar.model_dump()),
        ),
        limits=VoltageLimits(
            v_max=model_file.voltage.v_max,
            vr_min=model_file.voltage.vr_min,
            reference_bus=layout.position(generator.bus),
        ),
        demand_cost=DemandCost(**coefficients.demand.model_dump()),
    )


def _allowed(model: TENModel, itinerary: Itinerary, window: str) -> set[int]:
    """Vehicle capabilities of one vehicle that may start inside a window."""
    ev, home, work = itinerary.ev_id, itinerary.home, itinerary.work
    allowed = set()
    for c in model.capabilities:
        if c.ev != ev:
            continue
        driving = c.family in DRIVING_FAMILIES
        at_work = c.family in (Family.TP, Family.CW_WORK) and c.buffer == work
        at_home = c.family in (Family.TP, Family.CW_HOME) and c.buffer == home
        if (
            (window == "morning" and (driving or at_work))
            or (window == "workday" and at_work)
            or (window == "evening" and (driving or at_home))
            or (window == "night" and at_home)
        ):
            allowed.add(c.index)
    return allowed


def _cap_steps(window: TimeWindow, steps: int) -> tuple[int, int]:
    """Firing steps governed by a window.

    The commutes own both of their deadlines; the workday and the night own the
    steps strictly between theirs.
    """
    if window.name == "morning":
        return 2, window.last
    if window.name == "evening":
        return window.first, window.last
    if window.name == "night":
        return window.first + 1, steps
    return window.first + 1, window.last - 1


def window_caps(model: TENModel) -> tuple[TimeCap, ...]:
    """Caps keeping every vehicle to the capabilities of its current window.

    The caps start at step 2; the first step is fixed by the initial parking.
    """
    caps = []
    for itinerary in model.itineraries:
        vehicle = set(model.transitions(VEHICLE_FAMILIES, itinerary.ev_id).tolist())
        for window in itinerary.windows:
            first, last = _cap_steps(window, model.steps)
            if first > last:
                continue
            banned = sorted(vehicle - _allowed(model, itinerary, window.name))
            if banned:
                caps.append(
                    TimeCap(
                        transitions=np.asarray(banned, dtype=np.int64),
                        first_step=first,
                        last_step=last,
                        upper=0.0,
                        tag=f"{window.name}_window",
                    )
                )
    return tuple(caps)


def shared_caps(model: TENModel) -> tuple[SumCap, ...]:
    """Road, workplace lot and workplace charger capacities shared by the fleet."""
    model_file = model.model_file
    caps = []
    for road in model_file.roads:
        for origin, destination in [(road.a, road.b), (road.b, road.a)]:
            using = [
                c.index
                for c in model.capabilities
                if c.family in DRIVING_FAMILIES
                and c.origin == origin
                and c.destination == destination
            ]
            if using:
                caps.append(
                    SumCap(
                        transitions=np.asarray(using, dtype=np.int64),
                        coefficients=np.ones(len(using)),
                        upper=float(road.capacity),
                        tag=f"road_capacity:{origin}->{destination}",
                    )
                )
    work = model_file.itineraries.work
    lot = [
        c.index
        for c in model.capabilities
        if c.family in (Family.TP, Family.CW_WORK) and c.buffer == work
    ]
    chargers = [c.index for c in model.capabilities if c.family is Family.CW_WORK]
    for using, upper, tag in [
        (lot, model_file.capacities.work_lot, "work_lot"),
        (chargers, model_file.capacities.work_chargers, "work_chargers"),
    ]:
        if using:
            caps.append(
                SumCap(
                    transitions=np.asarray(using, dtype=np.int64),
                    coefficients=np.ones(len(using)),
                    upper=float(upper),
                    tag=tag,
                )
            )
    return tuple(caps)


def build_capacity(model: TENModel) -> CapacitySpec:
    """Bounds, window caps and shared capacities of a model.

    Electric places are pinned to zero, which makes their balance rows Kirchhoff's
    current law. Real currents are nonnegative and imaginary currents are free.
    Vehicles never park or charge at another vehicle's home.
    """
    net = model.net
    spec = CapacitySpec.default(net)
    electric_places = model.layout.electric_places()
    place_upper = np.ones(net.place_count)
    place_upper[electric_places] = 0.0

    firing_lower = np.zeros(net.transition_count)
    firing_upper = np.ones(net.transition_count)
    q_e_upper = np.ones(net.transition_count)
    homes = {it.ev_id: it.home for it in model.itineraries}
    for c in model.capabilities:
        if c.family in ELECTRIC_FAMILIES:
            firing_upper[c.index] = np.inf
            q_e_upper[c.index] = np.inf
            if c.part is Part.IMAG:
                firing_lower[c.index] = -np.inf
            continue
        if c.family not in (Family.TP, Family.CW_HOME) or c.buffer == homes[c.ev]:
            continue
        role = model.layout.buffers[model.layout.position(c.buffer)].role
        if role is BufferRole.NEIGHBORHOOD:
            firing_upper[c.index] = 0.0

    return spec.replace(
        place_upper=place_upper,
        firing_lower=firing_lower,
        firing_upper=firing_upper,
        q_e_upper=q_e_upper,
        time_caps=window_caps(model),
        sum_caps=shared_caps(model),
    )


def build_boundary(
    model: TENModel, itineraries: Iterable[Itinerary], kind: ScenarioKind
) -> BoundaryData:
    """Pins, initial and final conditions of one scenario.

    Both scenarios start every vehicle parked at home with the initial charge, pin
    the solar currents to their profile and require the final charge at the end.
    The uncoordinated scenario pins parking at work when the morning commute ends
    and parking at home when the evening commute ends. The coordinated scenario
    pins parking or charging at those times instead, and requires the vehicle to be
    parked or charging at work when the evening commute starts.

    Raises:
        ConfigurationError: The itineraries refer to buffers without parking.
    """
    itineraries = tuple(itineraries)
    net, fleet = model.net, model.model_file.fleet
    pins: list[Pin] = []
    sum_pins: list[SumPin] = []
    initial_q_e = np.zeros(net.transition_count)

    pf = model.power_flow
    for k in range(1, model.steps + 1):
        current = pf.solar.current[k - 1]
        for i in range(pf.solar.real.size):
            real, imag = int(pf.solar.real[i]), int(pf.solar.imag[i])
            pins.append(Pin(U_MINUS, k, real, float(current[i].real), "solar_profile"))
            pins.append(Pin(U_MINUS, k, imag, float(current[i].imag), "solar_profile"))

    for it in itineraries:
        try:
            home_park = model.find(Family.TP, it.ev_id, buffer=it.home).index
            work_park = model.find(Family.TP, it.ev_id, buffer=it.work).index
        except KeyError as e:
            raise ConfigurationError(f"Vehicle {it.ev_id}: {e.args[0]}") from None
        initial_q_e[home_park] = 1.0
        pins.append(Pin(U_MINUS, 1, home_park, 1.0, "initial_parking"))

        if kind is ScenarioKind.UNCOORDINATED:
            for k, place, tag in [
                (it.arrival_at_work, work_park, "work_arrival"),
                (it.arrival_at_home, home_park, "home_arrival"),
            ]:
                pins.append(Pin(Q_E, k, place, 1.0, tag))
                pins.append(Pin(U_MINUS, k, place, 1.0, tag))
            continue

        work = [work_park, *_chargers(model, Family.CW_WORK, it.ev_id, it.work)]
        home = [home_park, *_chargers(model, Family.CW_HOME, it.ev_id, it.home)]
        for k, group, tag, families in [
            (it.arrival_at_work, work, "work_arrival", (Q_E, U_MINUS)),
            (it.departure_from_work, work, "work_departure", (Q_E,)),
            (it.arrival_at_home, home, "home_arrival", (Q_E, U_MINUS)),
        ]:
            for family in families:
                terms = tuple((family, t, 1.0) for t in group)
                sum_pins.append(SumPin(terms, k, 1.0, tag))

    ev_count = len(itineraries)
    return BoundaryData(
        pins=tuple(pins),
        sum_pins=tuple(sum_pins),
        initial_q_b=np.zeros(net.place_count),
        initial_q_e=initial_q_e,
        initial_soc=np.full(ev_count, fleet.initial_soc),
        final_soc=np.full(ev_count, fleet.final_soc),
    )


def _chargers(model: TENModel, family: Family, ev: int, buffer: int) -> list[int]:
    return [
        c.index
        for c in model.capabilities
        if c.family is family and c.ev == ev and c.buffer == buffer
    ]


def _horizon(model_file: ModelFile, config: ScenarioConfig) -> Horizon:
    clock = model_file.clock
    horizon = Horizon.from_clock(
        config.start or clock.start,
        config.end or clock.end,
        config.step_minutes or clock.step_minutes,
    )
    if config.horizon_steps is not None:
        horizon = horizon.truncate(config.horizon_steps)
    return horizon


def build_model(model_file: ModelFile, config: ScenarioConfig | None = None) -> TENModel:
    """Builds the nets, device data and boundary data of a model file.

    Args:
        model_file: A validated model file.
        config: Overrides of the fleet size, the clock and the scenario.

    Raises:
        ConfigurationError: The configuration does not fit the model file.

    Returns:
        The model with the boundary data of `config.scenario`.
    """
    config = config or ScenarioConfig()
    homes = model_file.itineraries.homes
    ev_count = len(homes) if config.ev_count is None else config.ev_count
    if ev_count > len(homes):
        raise ConfigurationError(
            f"{model_file.name or 'The model'} has itineraries for {len(homes)} vehicles, "
            f"{ev_count} requested"
        )
    fleet = model_file.fleet
    if not 0 <= fleet.initial_soc <= fleet.battery_capacity:
        raise ConfigurationError(f"Initial charge {fleet.initial_soc} exceeds the battery")
    if not 0 <= fleet.final_soc <= fleet.battery_capacity:
        raise ConfigurationError(f"Final charge {fleet.final_soc} exceeds the battery")

    buffers = _check_buffers(model_file)
    horizon = _horizon(model_file, config)
    layout = Layout(buffers, ev_count)
    itineraries = make_itineraries(model_file.itineraries, horizon, ev_count)

    builder = _Builder(layout)
    builder.electric(model_file)
    for ev in range(ev_count):
        builder.transport(model_file, ev)
    for ev in range(ev_count):
        builder.charging(model_file, ev)

    capabilities = tuple(builder.capabilities)
    vehicle = np.asarray([c.family in VEHICLE_FAMILIES for c in capabilities], dtype=bool)
    binary_places = np.zeros(layout.place_count, dtype=bool)
    binary_places[layout.vehicle_places()] = True
    net = EngineeringSystemNet.from_entries(
        layout.place_count,
        len(capabilities),
        builder.plus,
        builder.minus,
        durations=[c.duration for c in capabilities],
        binary_places=binary_places,
        binary_transitions=vehicle,
        place_names=layout.place_names(),
        transition_names=[c.name for c in capabilities],
    )
    net.check_dimensions()

    operands = (
        TENOperand(OperandKind.CURRENT_REAL),
        TENOperand(OperandKind.CURRENT_IMAG),
        *(TENOperand(OperandKind.EV, ev) for ev in range(ev_count)),
    )
    model = TENModel(
        net=net,
        operand_nets=tuple(
            OperandNet(fleet.battery_capacity, f"ev{ev}") for ev in range(ev_count)
        ),
        operands=operands,
        sync=SyncMatrix.from_entries(ev_count, len(capabilities), builder.sync),
        boundary=BoundaryData((), (), np.zeros(0), np.zeros(0), np.zeros(0)),
        capacity=CapacitySpec.default(net),
        power_flow=_power_flow(model_file, layout, capabilities, horizon),
        capabilities=capabilities,
        layout=layout,
        itineraries=itineraries,
        horizon=horizon,
        model_file=model_file,
        kind=config.scenario,
    )
    model = dataclasses.replace(
        model,
        capacity=build_capacity(model),
        boundary=build_boundary(model, itineraries, config.scenario),
    )
    logger.info(
        "Built %s: %d places, %d transitions (%d electric, %d transport, %d charging), K = %d",
        model_file.name or "model",
        net.place_count,
        net.transition_count,
        model.transitions(ELECTRIC_FAMILIES).size,
        model.transitions(TRANSPORT_FAMILIES).size,
        model.transitions(CHARGING_FAMILIES).size,
        horizon.steps,
    )
    return model


def build_symmetrica(config: ScenarioConfig | None = None) -> TENModel:
    """The 26-buffer, 32-vehicle test case shipped with the package."""
    return build_model(load_model_file("symmetrica"), config)


def build_mini(config: ScenarioConfig | None = None) -> TENModel:
    """A 4-buffer, 2-vehicle instance small enough for exhaustive checks."""
    return build_model(load_model_file("mini"), config)
