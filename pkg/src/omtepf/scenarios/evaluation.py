"""Costs, energies, fleet metrics and audits of a scenario result."""

from __future__ import annotations

import dataclasses
import logging
from typing import TYPE_CHECKING

import numpy as np

from omtepf.petri.nets import Marking
from omtepf.petri.stepping import replay
from omtepf.plugins.power_flow import audit_power_flow, category_power
from omtepf.scenarios.schedule import soc_trajectory
from omtepf.ten.taxonomy import CHARGING_FAMILIES, DRIVING_FAMILIES, Family

if TYPE_CHECKING:
    from omtepf.scenarios.result import ScenarioResult
    from omtepf.scenarios.schedule import Schedule
    from omtepf.ten.builder import TENModel

logger = logging.getLogger(__name__)

COST_LABELS = {
    "transportation": "Z_TT",
    "queuing": "Z_TQ",
    "generation": "Z_EGC",
    "solar": "Z_EGS",
    "charging": "Z_EC",
    "demand": "Z_EDS",
}


@dataclasses.dataclass(frozen=True)
class CostBreakdown:
    """The six cost terms of one scenario."""

    transportation: float
    queuing: float
    generation: float
    solar: float
    charging: float
    demand: float

    @property
    def total(self) -> float:
        return sum(self.as_dict().values())

    def as_dict(self) -> dict[str, float]:
        """Terms keyed by their Z labels, in reporting order."""
        return {label: getattr(self, name) for name, label in COST_LABELS.items()}


@dataclasses.dataclass(frozen=True)
class EnergyRow:
    category: str
    cost: float
    energy: float

    @property
    def unit_cost(self) -> float:
        return self.cost / self.energy if self.energy > 0 else 0.0


@dataclasses.dataclass(frozen=True)
class Metrics:
    """Fleet performance over n_ev·(K+1) vehicle-steps.

    Args:
        quality_of_service: 1 − queued vehicle-steps / total.
        fleet_utilization: Driving vehicle-steps / total; wireless charging counts
            as driving.
        fleet_availability: 1 − (wired charging + waiting for a charger) / total.
        effective_utilization: Utilization / availability.
        queue_peak: Largest number of vehicles queued at one of the markings 1..K.
        window_queues: Queued vehicle-steps of each itinerary window.
    """

    quality_of_service: float
    fleet_utilization: float
    fleet_availability: float
    effective_utilization: float
    queue_peak: int
    window_queues: dict[str, int]

    def as_dict(self) -> dict[str, object]:
        return dataclasses.asdict(self)


def vehicle_queue(model: TENModel, q_b: np.ndarray) -> np.ndarray:
    """Vehicles waiting in a buffer at markings 1..K+1."""
    if not model.ev_count:
        return np.zeros(q_b.shape[0])
    return np.rint(q_b[:, model.layout.vehicle_places()]).sum(axis=1)


def cost_breakdown(
    model: TENModel, schedule: Schedule, q_b: np.ndarray, voltage: np.ndarray
) -> CostBreakdown:
    """Evaluates every cost term on the trajectories of a scenario.

    Queuing counts markings 1..K; the others count firing steps 1..K. Road trips
    include the wireless charging ones.
    """
    coefficients = model.model_file.coefficients
    pf = model.power_flow
    u = schedule.u_minus
    steps = model.steps

    roads = model.transitions(DRIVING_FAMILIES)
    charging = model.transitions(CHARGING_FAMILIES)
    rates = np.asarray([model.capabilities[t].rate for t in charging.tolist()])

    generator = u[:, pf.generators.real] + 1j * u[:, pf.generators.imag]
    demand = 0.0
    squared = np.abs(voltage[:, pf.loads.bus]) ** 2
    for i in range(pf.loads.count):
        for k in range(steps):
            quartic, quadratic = pf.demand_cost.coefficients(
                float(pf.loads.conductance[k, i]), float(pf.loads.susceptance[k, i])
            )
            s = squared[k, i]
            demand += quartic * s**2 + quadratic * s + pf.demand_cost.gamma

    return CostBreakdown(
        transportation=coefficients.road * float(u[:, roads].sum()),
        queuing=coefficients.queue * float(vehicle_queue(model, q_b)[:steps].sum()),
        generation=float(pf.generators.cost.value(generator).sum()),
        solar=float(pf.solar.cost.value(pf.solar.current[:steps]).sum()),
        charging=-coefficients.charging * float((u[:, charging] * rates).sum()),
        demand=demand,
    )


def energy_table(
    model: TENModel, schedule: Schedule, voltage: np.ndarray, costs: CostBreakdown
) -> tuple[EnergyRow, ...]:
    """Energy delivered by each electric category, with its cost.

    Energies are Σ_k |Re(V·conj(I))|·Δt in per-unit hours.
    """
    power = category_power(model.net, model.power_flow, schedule.u_plus, schedule.u_minus, voltage)
    hours = model.horizon.hours_per_step

    def energy(name: str) -> float:
        return abs(float(power[name].real.sum())) * hours

    return (
        EnergyRow("generation", costs.generation, energy("generator")),
        EnergyRow("solar", costs.solar, energy("solar")),
        EnergyRow("charging", costs.charging, energy("charging")),
        EnergyRow("demand", costs.demand, energy("load")),
    )


def evaluate(result: ScenarioResult, model: TENModel) -> Metrics:
    """Fleet metrics of a scenario result."""
    return fleet_metrics(model, result.q_b, result.q_e, result.queued_for_charging)


def fleet_metrics(
    model: TENModel, q_b: np.ndarray, q_e: np.ndarray, queued_for_charging: np.ndarray
) -> Metrics:
    """Fleet metrics of marking trajectories 1..K+1."""
    total = model.ev_count * (model.steps + 1)
    if not total:
        return Metrics(1.0, 0.0, 1.0, 0.0, 0, {})
    queue = vehicle_queue(model, q_b)
    queued = float(queue[: model.steps].sum())

    driving = model.transitions(DRIVING_FAMILIES)
    wired = model.transitions([Family.CW_HOME, Family.CW_WORK])
    driving_steps = float(np.rint(q_e[:, driving]).sum())
    charging_steps = float(np.rint(q_e[:, wired]).sum())
    waiting_steps = float(queued_for_charging.sum())

    utilization = driving_steps / total
    availability = 1.0 - (charging_steps + waiting_steps) / total
    windows: dict[str, int] = {}
    for window in model.itineraries[0].windows:
        last = min(window.last, model.steps)
        windows[window.name] = int(queue[window.first - 1 : last].sum())
    return Metrics(
        quality_of_service=1.0 - queued / total,
        fleet_utilization=utilization,
        fleet_availability=availability,
        effective_utilization=utilization / availability if availability > 0 else 0.0,
        queue_peak=int(queue[: model.steps].max(initial=0)),
        window_queues=windows,
    )


@dataclasses.dataclass(frozen=True)
class ScenarioAudit:
    """Checks every scenario result passes before it is reported.

    Args:
        replay_residual: Largest difference between the reported markings and a
            replay of the reported firings.
        conservation: Largest deviation of any vehicle's token count from one.
        soc_residual: Largest difference between each vehicle's final charge and
            its charge target; 0 if there is no target.
        kcl: Largest current mismatch at any bus and step.
        balance: Largest complex power mismatch at any step.
        soc_drift: Largest difference between the reported charges and the charges
            the reported firings imply; held to `balance_tol`.
    """

    replay_residual: float
    conservation: float
    soc_residual: float
    kcl: float
    balance: float
    soc_drift: float = 0.0

    def ok(self, tol: float = 1e-6, balance_tol: float = 1e-4) -> bool:
        return (
            max(self.replay_residual, self.conservation, self.soc_residual, self.kcl) <= tol
            and max(self.balance, self.soc_drift) <= balance_tol
        )


def audit_scenario(
    model: TENModel,
    schedule: Schedule,
    q_b: np.ndarray,
    q_e: np.ndarray,
    soc: np.ndarray,
    voltage: np.ndarray,
) -> ScenarioAudit:
    """Replays the firings and checks conservation, power flow and charge closure."""
    boundary = model.boundary
    replayed_b, replayed_e = replay(
        model.net,
        Marking(boundary.initial_q_b, boundary.initial_q_e),
        schedule.u_minus,
        schedule.u_plus,
        model.dt,
    )
    vehicle = model.layout.vehicle_places()
    moving = np.flatnonzero(model.net.binary_transitions)
    replay_residual = max(
        float(np.abs(replayed_b[:, vehicle] - q_b[:, vehicle]).max(initial=0.0)),
        float(np.abs(replayed_e[:, moving] - q_e[:, moving]).max(initial=0.0)),
    )

    conservation = 0.0
    for ev in range(model.ev_count):
        own = model.layout.vehicle_places(ev)
        own_transitions = np.asarray(
            [c.index for c in model.capabilities if c.ev == ev], dtype=np.int64
        )
        tokens = q_b[:, own].sum(axis=1) + q_e[:, own_transitions].sum(axis=1)
        conservation = max(conservation, float(np.abs(tokens - 1.0).max(initial=0.0)))

    soc_residual = soc_drift = 0.0
    if model.ev_count:
        implied = soc_trajectory(model, schedule.u_minus)
        soc_drift = float(np.abs(implied - soc).max())
        if boundary.final_soc is not None:
            soc_residual = float(np.abs(soc[-1] - boundary.final_soc).max())

    pf = audit_power_flow(model.net, model.power_flow, schedule.u_plus, schedule.u_minus, voltage)
    report = ScenarioAudit(
        replay_residual=replay_residual,
        conservation=conservation,
        soc_residual=soc_residual,
        kcl=float(pf.kcl.max(initial=0.0)),
        balance=float(pf.balance.max(initial=0.0)),
        soc_drift=soc_drift,
    )
    if not report.ok():
        logger.warning("Scenario audit failed: %s", report)
    return report
