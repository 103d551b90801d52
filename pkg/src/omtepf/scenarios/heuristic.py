"""The charging behavior of drivers who do not coordinate with the grid.

Drivers charge as soon as their battery is partially depleted. A vehicle on an
electrified road charges wirelessly instead of only driving. A vehicle parked
where it may charge plugs in if a charger is free and otherwise waits in a
first-come, first-served queue. Once plugged in, it keeps its charger until the
battery is full or it leaves.
"""

from __future__ import annotations

import collections
import dataclasses
import logging
from typing import TYPE_CHECKING

import numpy as np

from omtepf.exceptions import HeuristicConflictError
from omtepf.ten.taxonomy import VEHICLE_FAMILIES, Family

if TYPE_CHECKING:
    from omtepf.scenarios.schedule import Schedule
    from omtepf.ten.builder import TENModel
    from omtepf.ten.taxonomy import Capability

logger = logging.getLogger(__name__)

# Charge units a battery must miss before its driver looks for a charger.
DEPLETION_THRESHOLD = 1.0
_TOL = 1e-9


@dataclasses.dataclass
class ChargingQueueState:
    """Chargers of one station and the vehicles waiting for them.

    Args:
        station: Label of the station.
        capacity: Number of chargers; None for a station without a limit.
        charging: Vehicle -> first step at which its charger is free again.
        waiting: Vehicles in arrival order.
    """

    station: str
    capacity: int | None = None
    charging: dict[int, int] = dataclasses.field(default_factory=dict)
    waiting: collections.deque[int] = dataclasses.field(default_factory=collections.deque)

    @property
    def occupancy(self) -> int:
        return len(self.charging)

    def free(self) -> bool:
        return self.capacity is None or self.occupancy < self.capacity

    def request(self, ev: int) -> None:
        """Adds a vehicle to the end of the queue unless it is already served or queued."""
        if ev not in self.charging and ev not in self.waiting:
            self.waiting.append(ev)

    def withdraw(self, ev: int) -> None:
        if ev in self.waiting:
            self.waiting.remove(ev)

    def release(self, k: int) -> list[int]:
        """Frees the chargers whose session ended by step k and returns their vehicles."""
        done = sorted(ev for ev, until in self.charging.items() if until <= k)
        for ev in done:
            del self.charging[ev]
        return done

    def extend(self, ev: int, until: int) -> None:
        """Keeps a vehicle on its charger for another session."""
        self.charging[ev] = until

    def admit(self, k: int, duration: int) -> list[int]:
        """Plugs in waiting vehicles, head of the queue first, while chargers are free."""
        admitted = []
        while self.waiting and self.free():
            ev = self.waiting.popleft()
            self.charging[ev] = k + duration
            admitted.append(ev)
        return admitted


@dataclasses.dataclass(frozen=True, eq=False)
class HeuristicOutcome:
    """Rewritten schedule, queue trajectory and charges after the pass.

    `queued_for_charging[k, ev]` is 1 when the vehicle spent the step ending at
    marking k + 1 waiting for a charger.
    """

    schedule: Schedule
    queued_for_charging: np.ndarray
    soc_end: np.ndarray


class _Fleet:
    """Per-vehicle lookups of the capabilities the heuristic rewrites."""

    def __init__(self, model: TENModel) -> None:
        self.model = model
        self.vehicle = [model.transitions(VEHICLE_FAMILIES, ev) for ev in range(model.ev_count)]
        self.wireless: dict[tuple[int, int, int], Capability] = {}
        self.chargers: dict[tuple[int, int], Capability] = {}
        for c in model.capabilities:
            if c.family is Family.CR:
                self.wireless[c.ev, c.origin, c.destination] = c
        for it in model.itineraries:
            for family, buffer in [(Family.CW_HOME, it.home), (Family.CW_WORK, it.work)]:
                try:
                    self.chargers[it.ev_id, buffer] = model.find(family, it.ev_id, buffer=buffer)
                except KeyError:
                    continue

    def started(self, schedule: Schedule, ev: int, k: int) -> Capability | None:
        hits = schedule.started(k, self.vehicle[ev])
        if hits.size > 1:
            raise HeuristicConflictError(f"Vehicle {ev} starts {hits.size} capabilities at k={k}")
        return self.model.capabilities[int(hits[0])] if hits.size else None


def _wants_charge(soc: float, capacity: float, rate: float) -> bool:
    return soc <= capacity - DEPLETION_THRESHOLD + _TOL and soc + rate <= capacity + _TOL


def _swap(schedule: Schedule, old: Capability, new: Capability, k: int) -> None:
    if old.duration != new.duration:
        raise HeuristicConflictError(
            f"Cannot replace {old.name} by {new.name}: durations {old.duration} and {new.duration}"
        )
    schedule.cancel(old.index, k, old.duration)
    schedule.fire(new.index, k, new.duration)


def charging_heuristic(
    model: TENModel,
    schedule: Schedule,
    first: int,
    last: int,
    soc: np.ndarray | None = None,
) -> HeuristicOutcome:
    """Rewrites parking and road firings of steps [first, last] into charging.

    Vehicles are served in order of arrival at their current buffer, then by id.

    Args:
        model: The model.
        schedule: A schedule feasible for the transportation system; it is copied.
        first: First firing step of the pass.
        last: Last firing step of the pass.
        soc: Charges at marking `first`; defaults to the initial charges.

    Raises:
        HeuristicConflictError: A rewrite breaks a capacity, or a battery leaves
            [0, capacity].

    Returns:
        The outcome.
    """
    schedule = schedule.copy()
    fleet = _Fleet(model)
    soc = np.array(model.boundary.initial_soc if soc is None else soc, dtype=float)
    capacity = np.asarray([net.capacity for net in model.operand_nets])
    queued = np.zeros((model.steps + 1, model.ev_count))
    arrived = {ev: _last_arrival(schedule, fleet, ev, first) for ev in range(model.ev_count)}
    work_chargers = model.model_file.capacities.work_chargers
    stations: dict[int, ChargingQueueState] = {}
    converted = plugged = 0

    def station(c: Capability) -> ChargingQueueState:
        if c.buffer not in stations:
            limited = c.family is Family.CW_WORK
            stations[c.buffer] = ChargingQueueState(
                station=f"{c.family.value}@{c.buffer}",
                capacity=work_chargers if limited else None,
            )
        return stations[c.buffer]

    for k in range(first, last + 1):
        wanting: dict[int, list[tuple[int, int, Capability, Capability]]] = {}
        for ev in range(model.ev_count):
            c = fleet.started(schedule, ev, k)
            if c is None:
                continue
            if c.family is Family.TT:
                arrived[ev] = k + c.duration
                wireless = fleet.wireless.get((ev, c.origin, c.destination))
                if wireless is not None and _wants_charge(
                    soc[ev], capacity[ev], wireless.soc_change
                ):
                    _swap(schedule, c, wireless, k)
                    converted += 1
            elif c.family is Family.CR:
                arrived[ev] = k + c.duration
            elif c.family is Family.TP:
                charger = fleet.chargers.get((ev, c.buffer))
                if charger is not None and _wants_charge(soc[ev], capacity[ev], charger.rate):
                    wanting.setdefault(c.buffer, []).append((arrived[ev], ev, c, charger))

        for buffer, queue in stations.items():
            present = {ev for _, ev, _, _ in wanting.get(buffer, [])}
            for ev in list(queue.waiting):
                if ev not in present:
                    queue.withdraw(ev)
            for ev in queue.release(k):
                if ev in present:
                    charger = fleet.chargers[ev, buffer]
                    queue.extend(ev, k + charger.duration)

        for buffer, requests in wanting.items():
            queue = station(requests[0][3])
            for _, ev, _, _ in sorted(requests, key=lambda r: (r[0], r[1])):
                queue.request(ev)
            charger_duration = requests[0][3].duration
            queue.admit(k, charger_duration)
            for _, ev, parking, charger in requests:
                if ev in queue.charging and queue.charging[ev] == k + charger.duration:
                    _swap(schedule, parking, charger, k)
                    plugged += 1
            for ev in queue.waiting:
                queued[k, ev] = 1.0

        for ev in range(model.ev_count):
            c = fleet.started(schedule, ev, k)
            if c is not None:
                soc[ev] += c.soc_change
            if not -_TOL <= soc[ev] <= capacity[ev] + _TOL:
                raise HeuristicConflictError(
                    f"Vehicle {ev} reaches charge {soc[ev]:g} "
                    f"outside [0, {capacity[ev]:g}] at k={k}"
                )

    check_caps(model, schedule, first, last)
    logger.info(
        "Charging heuristic on steps %d-%d: %d wireless trips, %d charging sessions, "
        "%d queued vehicle-steps",
        first,
        last,
        converted,
        plugged,
        int(queued.sum()),
    )
    return HeuristicOutcome(schedule, queued, soc)


def _last_arrival(schedule: Schedule, fleet: _Fleet, ev: int, k: int) -> int:
    """Marking at which the vehicle last reached a buffer before step k."""
    for step in range(k - 1, 0, -1):
        c = fleet.started(schedule, ev, step)
        if c is not None and c.family in (Family.TT, Family.CR):
            return step + c.duration
    return 1


def check_caps(model: TENModel, schedule: Schedule, first: int, last: int) -> None:
    """Checks the window and shared capacities of firing steps [first, last].

    Raises:
        HeuristicConflictError: A capacity is exceeded.
    """
    u = schedule.u_minus
    for cap in model.capacity.time_caps:
        lo, hi = max(first, cap.first_step), min(last, cap.last_step)
        if lo <= hi and (u[lo - 1 : hi, cap.transitions] > cap.upper + _TOL).any():
            raise HeuristicConflictError(f"Schedule breaks {cap.tag} in steps {lo}-{hi}")
    for cap in model.capacity.sum_caps:
        lo = first if cap.first_step is None else max(first, cap.first_step)
        hi = last if cap.last_step is None else min(last, cap.last_step)
        if lo > hi:
            continue
        load = u[lo - 1 : hi, cap.transitions] @ cap.coefficients
        over = np.flatnonzero(load > cap.upper + _TOL)
        if over.size:
            raise HeuristicConflictError(
                f"Schedule breaks {cap.tag} at k={lo + int(over[0])}: "
                f"{load[over[0]]:g} > {cap.upper:g}"
            )
