"""Programs solved by the operating scenarios.

The uncoordinated scenario solves transport programs over the commute windows
and an electric program with the charging schedule fixed; the coordinated
scenario solves the joint program over the whole day.
"""

from __future__ import annotations

import dataclasses
import logging
from typing import TYPE_CHECKING

import numpy as np

from omtepf.assembler.boundary import Pin, Restriction
from omtepf.assembler.families import LinearCost
from omtepf.assembler.program import ProgramSpec
from omtepf.assembler.variable_index import MARKING_FAMILIES, Q_B, U_MINUS
from omtepf.plugins.power_flow import PowerFlow, PowerFlowEmitter
from omtepf.ten.taxonomy import (
    CHARGING_FAMILIES,
    DRIVING_FAMILIES,
    ELECTRIC_FAMILIES,
    TRANSPORT_FAMILIES,
)

if TYPE_CHECKING:
    from omtepf.assembler.variable_index import VariableIndex
    from omtepf.ten.builder import TENModel

logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class StageState:
    """Global markings and charges at the first marking of a stage window."""

    q_b: np.ndarray
    q_e: np.ndarray
    soc: np.ndarray


@dataclasses.dataclass(frozen=True, eq=False)
class StageProgram:
    """A program over a sub-net and window, with the map back to the model."""

    spec: ProgramSpec
    restriction: Restriction


def cost_terms(
    model: TENModel,
    places: np.ndarray,
    transitions: np.ndarray,
    tags: tuple[str, ...] = ("Z_TQ", "Z_TT", "Z_EC"),
    *,
    last_step: int | None = None,
) -> tuple[LinearCost, ...]:
    """Linear transportation and charging cost terms over the kept elements.

    Z_TQ charges every vehicle waiting in a place, Z_TT every road trip started
    (wireless charging trips included), Z_EC credits every charge unit bought.

    Args:
        model: The model.
        places: Kept global places, in local order.
        transitions: Kept global transitions, in local order.
        tags: Terms to build.
        last_step: Last local step of the sums; defaults to the program horizon.
    """
    coefficients = model.model_file.coefficients
    vehicle = np.isin(places, model.layout.vehicle_places())
    queue = np.where(vehicle, coefficients.queue, 0.0)
    road = np.zeros(transitions.size)
    charging = np.zeros(transitions.size)
    for i, t in enumerate(transitions.tolist()):
        capability = model.capabilities[t]
        if capability.family in DRIVING_FAMILIES:
            road[i] = coefficients.road
        if capability.family in CHARGING_FAMILIES:
            charging[i] = -coefficients.charging * capability.rate
    built = {
        "Z_TQ": LinearCost(Q_B, queue, "Z_TQ", last_step=last_step),
        "Z_TT": LinearCost(U_MINUS, road, "Z_TT", last_step=last_step),
        "Z_EC": LinearCost(U_MINUS, charging, "Z_EC", last_step=last_step),
    }
    return tuple(built[tag] for tag in tags)


def transport_program(
    model: TENModel, first: int, last: int, state: StageState | None = None
) -> StageProgram:
    """Transportation program of the fleet over markings [first, last].

    Only parking and road capabilities take part; vehicles discharge while
    driving and never charge. The program minimizes Z_TT + Z_TQ and lets trips
    started before `last` finish after it, unless the window closes the horizon.

    Args:
        model: The model.
        first: First global marking of the window.
        last: Last global marking of the window.
        state: Replayed global state at `first`; defaults to the initial state.
    """
    transitions = model.transitions(TRANSPORT_FAMILIES)
    places = model.layout.vehicle_places()
    restriction = Restriction(
        places=places,
        transitions=transitions,
        operands=np.arange(model.ev_count),
        first=first,
        last=last,
        global_horizon=model.steps,
    )
    boundary = model.boundary.restrict(
        restriction,
        q_b=None if state is None else state.q_b,
        q_e=None if state is None else state.q_e,
        soc=None if state is None else state.soc,
    )
    spec = ProgramSpec(
        net=model.net.subnet(places, transitions),
        operand_nets=model.operand_nets,
        horizon=restriction.horizon,
        boundary=dataclasses.replace(boundary, final_soc=None),
        sync=model.sync.restrict(restriction),
        capacity=model.capacity.restrict(restriction),
        costs=cost_terms(model, places, transitions, ("Z_TQ", "Z_TT")),
        dt=model.dt,
        open_end=last <= model.steps,
        label=f"transport[{first},{last}]",
    )
    return StageProgram(spec, restriction)


def electric_program(model: TENModel, charging: np.ndarray) -> StageProgram:
    """Power flow of the whole day with the charging schedule fixed.

    Args:
        model: The model.
        charging: Global firing starts, shape (K, transition count); only the
            charging columns are read.

    Returns:
        A continuous program whose steps are independent of each other.
    """
    transitions = np.sort(
        np.concatenate([model.transitions(ELECTRIC_FAMILIES), model.transitions(CHARGING_FAMILIES)])
    )
    places = model.layout.electric_places()
    restriction = Restriction(
        places=places,
        transitions=transitions,
        operands=np.zeros(0, dtype=np.int64),
        first=1,
        last=model.steps + 1,
        global_horizon=model.steps,
    )
    boundary = model.boundary.restrict(restriction)
    local = {int(t): i for i, t in enumerate(transitions.tolist())}
    schedule = tuple(
        Pin(U_MINUS, k, local[int(t)], float(charging[k - 1, t]), "charging_schedule")
        for k in range(1, model.steps + 1)
        for t in model.transitions(CHARGING_FAMILIES).tolist()
    )
    boundary = dataclasses.replace(boundary, pins=boundary.pins + schedule)
    capacity = model.capacity.restrict(restriction).replace(time_caps=(), sum_caps=())
    power_flow = model.power_flow.restrict(places, transitions)
    spec = ProgramSpec(
        net=model.net.subnet(places, transitions, zero_durations=True, continuous=True),
        operand_nets=(),
        horizon=model.steps,
        boundary=boundary,
        sync=model.sync.restrict(restriction),
        capacity=capacity,
        costs=cost_terms(model, places, transitions, ("Z_EC",)),
        device_vars=power_flow.device_vars,
        device_families=(PowerFlow(power_flow),),
        emitter_types=(PowerFlowEmitter,),
        dt=model.dt,
        label="opf",
    )
    return StageProgram(spec, restriction)


def joint_program(model: TENModel) -> StageProgram:
    """Transportation, charging and power flow of the whole day in one program.

    The objective is Z_TQ + Z_EGC + Z_EGS + Z_EDS. A road trip costs what
    the charge it spends earns, so the road cost and the charging revenue cancel
    once the final charge is pinned and both are left out. The horizon is
    closed: no timed firing may complete after K.
    """
    net = model.net
    restriction = Restriction(
        places=np.arange(net.place_count),
        transitions=np.arange(net.transition_count),
        operands=np.arange(model.ev_count),
        first=1,
        last=model.steps + 1,
        global_horizon=model.steps,
    )
    pf = model.power_flow
    spec = ProgramSpec(
        net=net,
        operand_nets=model.operand_nets,
        horizon=model.steps,
        boundary=model.boundary,
        sync=model.sync,
        capacity=model.capacity,
        costs=cost_terms(model, restriction.places, restriction.transitions, ("Z_TQ",)),
        device_vars=pf.device_vars,
        device_families=(PowerFlow(pf),),
        emitter_types=(PowerFlowEmitter,),
        dt=model.dt,
        label="joint",
    )
    return StageProgram(spec, restriction)


def step_keys(index: VariableIndex) -> np.ndarray:
    """Time step of every firing and device column; -1 for marking columns."""
    keys = np.full(index.total, -1, dtype=np.int64)
    for family in index.families:
        if family.name in MARKING_FAMILIES or not family.count:
            continue
        steps = np.arange(family.first_step, family.last_step + 1)
        keys[family.offset : family.stop] = np.repeat(steps, family.size)
    return keys
