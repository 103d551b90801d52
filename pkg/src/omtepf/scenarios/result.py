"""Outcome of one operating scenario."""

from __future__ import annotations

import dataclasses
from typing import TYPE_CHECKING

import numpy as np

from omtepf.solvers.types import SolveStatus

if TYPE_CHECKING:
    from omtepf.config import ScenarioKind
    from omtepf.scenarios.evaluation import CostBreakdown, EnergyRow, Metrics, ScenarioAudit
    from omtepf.scenarios.schedule import Schedule
    from omtepf.solvers.types import SolveResult


@dataclasses.dataclass(frozen=True, eq=False)
class ScenarioResult:
    """Trajectories, costs and diagnostics of a scenario run.

    Args:
        kind: The scenario.
        schedule: Firing starts and ends, shape (K, transition count) each.
        q_b: Place markings 1..K+1.
        q_e: Transition markings 1..K+1.
        soc: Charge of every vehicle at markings 1..K+1.
        voltage: Complex bus voltages of steps 1..K.
        line_current: Complex line currents of steps 1..K, from-bus to to-bus.
        costs: The cost breakdown.
        energy: Energy table rows.
        metrics: Fleet metrics.
        queued_for_charging: Vehicles waiting for a charger, shape (K+1, n_ev).
        stages: Solver result of every stage, in execution order.
        audit: Conservation and power flow checks.
    """

    kind: ScenarioKind
    schedule: Schedule
    q_b: np.ndarray
    q_e: np.ndarray
    soc: np.ndarray
    voltage: np.ndarray
    line_current: np.ndarray
    costs: CostBreakdown
    energy: tuple[EnergyRow, ...]
    metrics: Metrics
    queued_for_charging: np.ndarray
    stages: dict[str, SolveResult]
    audit: ScenarioAudit

    @property
    def status(self) -> SolveStatus:
        """OPTIMAL if every stage is optimal, LIMIT otherwise."""
        if all(stage.optimal for stage in self.stages.values()):
            return SolveStatus.OPTIMAL
        return SolveStatus.LIMIT

    @property
    def total(self) -> float:
        return self.costs.total

