"""Writes the time series, cost tables and metrics of a scenario result."""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np
import pandas as pd

from omtepf.scenarios.evaluation import vehicle_queue
from omtepf.ten.taxonomy import CHARGING_FAMILIES, DRIVING_FAMILIES, Family

if TYPE_CHECKING:
    from omtepf.scenarios.result import ScenarioResult
    from omtepf.ten.builder import TENModel

logger = logging.getLogger(__name__)


def _step_index(model: TENModel) -> pd.Index:
    return pd.Index([model.horizon.clock(k) for k in range(1, model.steps + 1)], name="time")


def voltage_frame(result: ScenarioResult, model: TENModel) -> pd.DataFrame:
    """Voltage magnitude of every bus and step."""
    return pd.DataFrame(
        np.abs(result.voltage),
        index=_step_index(model),
        columns=[f"bus_{b.id}" for b in model.buffers],
    )


def line_current_frame(result: ScenarioResult, model: TENModel) -> pd.DataFrame:
    """Current magnitude of every line and step."""
    lines = model.model_file.lines
    return pd.DataFrame(
        np.abs(result.line_current),
        index=_step_index(model),
        columns=[f"line_{line.from_bus}-{line.to_bus}" for line in lines],
    )


def soc_frame(result: ScenarioResult, model: TENModel) -> pd.DataFrame:
    """Charge of every vehicle at markings 1..K."""
    return pd.DataFrame(
        result.soc[: model.steps],
        index=_step_index(model),
        columns=[f"ev{ev}" for ev in range(model.ev_count)],
    )


def location_frame(result: ScenarioResult, model: TENModel) -> pd.DataFrame:
    """What every vehicle is doing at markings 1..K.

    Entries read "park@17", "charge@17", "road 17->19", "wireless 17->19" or
    "queue@19" for a vehicle waiting in a buffer.
    """
    labels = {
        Family.TP: "park",
        Family.CW_HOME: "charge",
        Family.CW_WORK: "charge",
        Family.TT: "road",
        Family.CR: "wireless",
    }
    moving = frozenset(DRIVING_FAMILIES)
    table = np.full((model.steps, model.ev_count), "", dtype=object)
    active = np.argwhere(np.rint(result.q_e[: model.steps]) > 0)
    for row, t in active.tolist():
        c = model.capabilities[t]
        if c.ev is None:
            continue
        label = labels[c.family]
        where = f" {c.origin}->{c.destination}" if c.family in moving else f"@{c.buffer}"
        table[row, c.ev] = label + where
    for ev in range(model.ev_count):
        places = model.layout.vehicle_places(ev)
        for row, position in np.argwhere(np.rint(result.q_b[: model.steps, places]) > 0).tolist():
            table[row, ev] = f"queue@{model.buffers[position].id}"
    return pd.DataFrame(
        table, index=_step_index(model), columns=[f"ev{ev}" for ev in range(model.ev_count)]
    )


def queue_frame(result: ScenarioResult, model: TENModel) -> pd.DataFrame:
    """Vehicles waiting in buffers and for chargers at markings 1..K."""
    return pd.DataFrame(
        {
            "buffer": vehicle_queue(model, result.q_b)[: model.steps],
            "charger": result.queued_for_charging[: model.steps].sum(axis=1),
        },
        index=_step_index(model),
    )


def generation_frame(result: ScenarioResult, model: TENModel) -> pd.DataFrame:
    """Generator, solar and charging currents of every step, summed over units."""
    pf = model.power_flow
    u = result.schedule.u_minus
    charging = model.transitions(CHARGING_FAMILIES)
    draws = np.asarray([model.capabilities[t].draw for t in charging.tolist()], dtype=complex)
    return pd.DataFrame(
        {
            "generator_real": u[:, pf.generators.real].sum(axis=1),
            "generator_imag": u[:, pf.generators.imag].sum(axis=1),
            "solar_real": u[:, pf.solar.real].sum(axis=1),
            "solar_imag": u[:, pf.solar.imag].sum(axis=1),
            "charging_real": (u[:, charging] * draws.real).sum(axis=1),
            "charging_imag": (u[:, charging] * draws.imag).sum(axis=1),
        },
        index=_step_index(model),
    )


def summary_frame(result: ScenarioResult) -> pd.DataFrame:
    """The six cost terms and their total."""
    terms = result.costs.as_dict()
    terms["total"] = result.costs.total
    return pd.DataFrame({"term": list(terms), "value": list(terms.values())})


def energy_frame(result: ScenarioResult) -> pd.DataFrame:
    """Cost, energy and unit cost of every electric category."""
    return pd.DataFrame(
        [
            {
                "category": row.category,
                "cost": row.cost,
                "energy": row.energy,
                "unit_cost": row.unit_cost,
            }
            for row in result.energy
        ]
    )


def metrics_blob(result: ScenarioResult) -> dict[str, object]:
    """Metrics, status and per-stage diagnostics, ready for JSON."""
    return {
        "scenario": result.kind.value,
        "status": result.status.value,
        "total": result.total,
        "metrics": result.metrics.as_dict(),
        "audit_ok": result.audit.ok(),
        "stages": {
            name: {
                "status": stage.status.value,
                "objective": stage.objective,
                "nodes": stage.node_count,
                "seconds": stage.wall_time,
                "message": stage.message,
            }
            for name, stage in result.stages.items()
        },
    }


def write_report(result: ScenarioResult, model: TENModel, out_dir: str | Path) -> list[Path]:
    """Writes every report file of a result into a directory.

    Raises:
        OSError: The directory or a file cannot be written.

    Returns:
        The written paths.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    series = {
        "voltage.csv": voltage_frame,
        "line_current.csv": line_current_frame,
        "soc.csv": soc_frame,
        "location.csv": location_frame,
        "queue.csv": queue_frame,
        "generation.csv": generation_frame,
    }
    for name, frame in series.items():
        frame(result, model).to_csv(out / name)
        written.append(out / name)
    for name, table in [("summary.csv", summary_frame(result)), ("energy.csv", energy_frame(result))]:
        table.to_csv(out / name, index=False)
        written.append(out / name)
    metrics = out / "metrics.json"
    metrics.write_text(json.dumps(metrics_blob(result), indent=2, default=float), encoding="utf-8")
    written.append(metrics)
    logger.info("Wrote %d report files to %s", len(written), out)
    return written
