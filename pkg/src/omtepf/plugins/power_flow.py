"""Current-voltage AC optimal power flow device models.

Electric currents are the firings of the electric transitions of the net, one
transition for the real part and one for the imaginary part of every device. Bus
voltages are device variables `V_R` and `V_I` at steps 1..K. Kirchhoff's current law
comes from the net itself: the electric places are pinned to zero, so the place rows
balance the currents entering and leaving every bus.
"""

from __future__ import annotations

import dataclasses
import logging
from typing import TYPE_CHECKING

import numpy as np

from omtepf.assembler.families import DeviceRow
from omtepf.assembler.hfnmcf import attach_device_models
from omtepf.assembler.plugin import Emitter
from omtepf.assembler.problem import BoundUpdate, Emission, QuadraticConstraint, SquaredNormTerm
from omtepf.assembler.variable_index import U_MINUS
from omtepf.exceptions import ConvexityError, StructuralError

if TYPE_CHECKING:
    from collections.abc import Sequence

    from omtepf.assembler.variable_index import VariableIndex
    from omtepf.petri.nets import EngineeringSystemNet

logger = logging.getLogger(__name__)

V_R = "V_R"
V_I = "V_I"


def _ints(values: Sequence[int] | np.ndarray) -> np.ndarray:
    return np.asarray(values, dtype=np.int64)


def _floats(values: Sequence[float] | np.ndarray) -> np.ndarray:
    return np.asarray(values, dtype=float)


def _remap(values: np.ndarray, kept: np.ndarray) -> np.ndarray:
    position = np.full(int(max(kept.max(initial=-1), values.max(initial=-1))) + 1, -1)
    position[kept] = np.arange(kept.size)
    mapped = position[values]
    if np.any(mapped < 0):
        raise StructuralError("Device refers to a transition outside the kept sub-net")
    return mapped


@dataclasses.dataclass(frozen=True, eq=False)
class LineParams:
    """Distribution lines.

    Args:
        real: Transition carrying the real current of each line.
        imag: Transition carrying the imaginary current of each line.
        from_bus: Sending bus; the line draws current there.
        to_bus: Receiving bus.
        conductance: G per line.
        susceptance: B per line.
        rating: Current magnitude limit per line, inf for none.
    """

    real: np.ndarray
    imag: np.ndarray
    from_bus: np.ndarray
    to_bus: np.ndarray
    conductance: np.ndarray
    susceptance: np.ndarray
    rating: np.ndarray

    @classmethod
    def create(
        cls,
        real: Sequence[int],
        imag: Sequence[int],
        from_bus: Sequence[int],
        to_bus: Sequence[int],
        conductance: Sequence[float],
        susceptance: Sequence[float],
        rating: Sequence[float] | None = None,
    ) -> LineParams:
        count = len(real)
        return cls(
            real=_ints(real),
            imag=_ints(imag),
            from_bus=_ints(from_bus),
            to_bus=_ints(to_bus),
            conductance=_floats(conductance),
            susceptance=_floats(susceptance),
            rating=np.full(count, np.inf) if rating is None else _floats(rating),
        )

    @property
    def count(self) -> int:
        return len(self.real)


@dataclasses.dataclass(frozen=True, eq=False)
class LoadParams:
    """Exogenous admittance loads; profiles have shape (K, load count)."""

    real: np.ndarray
    imag: np.ndarray
    bus: np.ndarray
    conductance: np.ndarray
    susceptance: np.ndarray

    @property
    def count(self) -> int:
        return len(self.real)


@dataclasses.dataclass(frozen=True)
class VoltageLimits:
    v_max: float = 1.1
    vr_min: float = 0.85
    reference_bus: int = 0


@dataclasses.dataclass(frozen=True)
class GenCost:
    """Cost α(|I|²)² + β|I|² + γ per unit and step."""

    alpha: float
    beta: float
    gamma: float = 0.0

    def value(self, current: np.ndarray) -> np.ndarray:
        squared = np.abs(current) ** 2
        return self.alpha * squared**2 + self.beta * squared + self.gamma


@dataclasses.dataclass(frozen=True)
class DemandCost:
    """Coefficients of the exogenous-demand revenue term."""

    rho_r: float = 0.6614
    beta_r: float = 0.6826
    rho_i: float = 0.00049
    beta_i: float = 0.0433
    gamma: float = 0.0

    def coefficients(self, g: float, b: float) -> tuple[float, float]:
        """(quartic, quadratic) coefficients on |V|² for admittance G + jB."""
        return self.rho_r * g**2 - self.rho_i * b**2, -(self.beta_r * g - self.beta_i * b)


@dataclasses.dataclass(frozen=True, eq=False)
class Generators:
    """Dispatchable generators with box bounds on their currents."""

    real: np.ndarray
    imag: np.ndarray
    bus: np.ndarray
    cost: GenCost
    real_max: float = 60.0
    imag_max: float = 60.0


@dataclasses.dataclass(frozen=True, eq=False)
class SolarUnits:
    """Exogenous current sources; `current` is complex with shape (K, unit count)."""

    real: np.ndarray
    imag: np.ndarray
    bus: np.ndarray
    current: np.ndarray
    cost: GenCost


@dataclasses.dataclass(frozen=True, eq=False)
class PowerFlowModel:
    """Everything the current-voltage power flow needs from a model.

    Args:
        bus_count: Number of buses.
        bus_real: Place holding the real current balance of each bus.
        bus_imag: Place holding the imaginary current balance of each bus.
        lines: Distribution lines.
        loads: Exogenous loads.
        generators: Dispatchable generators.
        solar: Solar units.
        limits: Voltage limits and reference bus.
        demand_cost: Demand revenue coefficients.
    """

    bus_count: int
    bus_real: np.ndarray
    bus_imag: np.ndarray
    lines: LineParams
    loads: LoadParams
    generators: Generators
    solar: SolarUnits
    limits: VoltageLimits = VoltageLimits()
    demand_cost: DemandCost = DemandCost()

    @property
    def device_vars(self) -> dict[str, int]:
        return {V_R: self.bus_count, V_I: self.bus_count}

    @property
    def electric_transitions(self) -> np.ndarray:
        parts = [
            self.solar.real,
            self.solar.imag,
            self.generators.real,
            self.generators.imag,
            self.loads.real,
            self.loads.imag,
            self.lines.real,
            self.lines.imag,
        ]
        return np.sort(np.concatenate(parts))

    def restrict(self, places: np.ndarray, transitions: np.ndarray) -> PowerFlowModel:
        """Renumbers places and transitions after a sub-net extraction."""
        places, transitions = _ints(places), _ints(transitions)

        def tr(values: np.ndarray) -> np.ndarray:
            return _remap(values, transitions)

        return dataclasses.replace(
            self,
            bus_real=_remap(self.bus_real, places),
            bus_imag=_remap(self.bus_imag, places),
            lines=dataclasses.replace(self.lines, real=tr(self.lines.real), imag=tr(self.lines.imag)),
            loads=dataclasses.replace(self.loads, real=tr(self.loads.real), imag=tr(self.loads.imag)),
            generators=dataclasses.replace(
                self.generators, real=tr(self.generators.real), imag=tr(self.generators.imag)
            ),
            solar=dataclasses.replace(self.solar, real=tr(self.solar.real), imag=tr(self.solar.imag)),
        )


def _require_voltages(index: VariableIndex) -> None:
    for name in (V_R, V_I):
        if name not in index:
            raise StructuralError(f"Voltage family {name} is not registered")


def emit_ohm_line(index: VariableIndex, lines: LineParams, k: int) -> list[DeviceRow]:
    """Ohm's law of every line at step k.

    With ΔV = V_from − V_to:
        U_R = G ΔV_R − B ΔV_I
        U_I = B ΔV_R + G ΔV_I
    """
    _require_voltages(index)
    rows = []
    for i in range(lines.count):
        g, b = float(lines.conductance[i]), float(lines.susceptance[i])
        f, t = int(lines.from_bus[i]), int(lines.to_bus[i])
        real = [
            (U_MINUS, k, int(lines.real[i]), 1.0),
            (V_R, k, f, -g),
            (V_R, k, t, g),
            (V_I, k, f, b),
            (V_I, k, t, -b),
        ]
        imag = [
            (U_MINUS, k, int(lines.imag[i]), 1.0),
            (V_R, k, f, -b),
            (V_R, k, t, b),
            (V_I, k, f, -g),
            (V_I, k, t, g),
        ]
        rows.append(DeviceRow(tuple(x for x in real if x[3] != 0), 0.0, 0.0, "ohm_line_real", k, i))
        rows.append(DeviceRow(tuple(x for x in imag if x[3] != 0), 0.0, 0.0, "ohm_line_imag", k, i))
    return rows


def emit_ohm_load(index: VariableIndex, loads: LoadParams, k: int) -> list[DeviceRow]:
    """Current drawn by every load at step k: I = Y V."""
    _require_voltages(index)
    rows = []
    for i in range(loads.count):
        g = float(loads.conductance[k - 1, i])
        b = float(loads.susceptance[k - 1, i])
        bus = int(loads.bus[i])
        real = [(U_MINUS, k, int(loads.real[i]), 1.0), (V_R, k, bus, -g), (V_I, k, bus, b)]
        imag = [(U_MINUS, k, int(loads.imag[i]), 1.0), (V_R, k, bus, -b), (V_I, k, bus, -g)]
        rows.append(DeviceRow(tuple(x for x in real if x[3] != 0), 0.0, 0.0, "ohm_load_real", k, i))
        rows.append(DeviceRow(tuple(x for x in imag if x[3] != 0), 0.0, 0.0, "ohm_load_imag", k, i))
    return rows


def emit_voltage_constraints(
    index: VariableIndex, limits: VoltageLimits, k: int
) -> tuple[list[QuadraticConstraint], BoundUpdate, DeviceRow]:
    """Magnitude cap, secant floor on V_R and the phase reference at step k."""
    _require_voltages(index)
    v_r, v_i = index[V_R], index[V_I]
    caps = [
        QuadraticConstraint(
            squares=(v_r.column(k, bus), v_i.column(k, bus)),
            linear=(),
            rhs=limits.v_max**2,
            tag=f"voltage_magnitude:{k}:{bus}",
        )
        for bus in range(v_r.size)
    ]
    floor = BoundUpdate.range(v_r.columns(k), limits.vr_min, np.inf, "voltage_secant")
    reference = DeviceRow(((V_I, k, limits.reference_bus, 1.0),), 0.0, 0.0, "phase_reference", k)
    return caps, floor, reference


def emit_thermal_limits(index: VariableIndex, lines: LineParams, k: int) -> list[QuadraticConstraint]:
    fam = index[U_MINUS]
    return [
        QuadraticConstraint(
            squares=(fam.column(k, int(lines.real[i])), fam.column(k, int(lines.imag[i]))),
            linear=(),
            rhs=float(lines.rating[i]) ** 2,
            tag=f"thermal_limit:{k}:{i}",
        )
        for i in range(lines.count)
        if np.isfinite(lines.rating[i])
    ]


def emit_generator_bounds(index: VariableIndex, generators: Generators) -> list[BoundUpdate]:
    fam = index[U_MINUS]
    steps = range(1, index.horizon + 1)
    real = fam.grid(steps)[:, generators.real].ravel()
    imag = fam.grid(steps)[:, generators.imag].ravel()
    return [
        BoundUpdate.range(real, 0.0, generators.real_max, "generator_limits"),
        BoundUpdate.range(imag, -generators.imag_max, generators.imag_max, "generator_limits"),
    ]


def _check_cost(cost: GenCost, name: str) -> None:
    if cost.alpha < 0 or cost.beta < 0:
        raise ConvexityError(
            f"{name} cost needs nonnegative coefficients, got alpha={cost.alpha}, beta={cost.beta}"
        )


def objective_terms(index: VariableIndex, model: PowerFlowModel) -> tuple[list[SquaredNormTerm], float]:
    """Electric objective terms over steps 1..K.

    Returns the generator and demand norm terms, and the constant solar cost.

    Raises:
        ConvexityError: A generator cost coefficient is negative.
    """
    _require_voltages(index)
    _check_cost(model.generators.cost, "Dispatchable generator")
    _check_cost(model.solar.cost, "Solar")
    u, v_r, v_i = index[U_MINUS], index[V_R], index[V_I]
    gen = model.generators
    terms: list[SquaredNormTerm] = []
    for k in range(1, index.horizon + 1):
        for real, imag in zip(gen.real.tolist(), gen.imag.tolist()):
            terms.append(
                SquaredNormTerm(
                    columns=(u.column(k, real), u.column(k, imag)),
                    quartic=gen.cost.alpha,
                    quadratic=gen.cost.beta,
                    constant=gen.cost.gamma,
                    tag="Z_EGC",
                )
            )
        for i in range(model.loads.count):
            g = float(model.loads.conductance[k - 1, i])
            b = float(model.loads.susceptance[k - 1, i])
            quartic, quadratic = model.demand_cost.coefficients(g, b)
            if quartic == 0 and quadratic == 0 and model.demand_cost.gamma == 0:
                continue
            bus = int(model.loads.bus[i])
            terms.append(
                SquaredNormTerm(
                    columns=(v_r.column(k, bus), v_i.column(k, bus)),
                    quartic=quartic,
                    quadratic=quadratic,
                    constant=model.demand_cost.gamma,
                    tag="Z_EDS",
                )
            )
    solar = model.solar.current[: index.horizon]
    offset = float(model.solar.cost.value(solar).sum())
    return terms, offset


def audit_convexity(terms: Sequence[SquaredNormTerm]) -> list[SquaredNormTerm]:
    """Returns the terms that are not convex."""
    nonconvex = [t for t in terms if not t.convex]
    if nonconvex:
        logger.info("%d of %d objective terms are not convex", len(nonconvex), len(terms))
    return nonconvex


def _check_profiles(model: PowerFlowModel, horizon: int) -> None:
    checks = [
        ("load conductance", model.loads.conductance.shape, (horizon, model.loads.count)),
        ("load susceptance", model.loads.susceptance.shape, (horizon, model.loads.count)),
    ]
    for name, actual, expected in checks:
        if actual[0] < expected[0] or actual[1:] != expected[1:]:
            raise StructuralError(f"{name} profile has shape {actual}, expected {expected}")
    if model.solar.current.shape[0] < horizon:
        raise StructuralError(f"Solar profile covers {model.solar.current.shape[0]} of {horizon} steps")


def emit_power_flow(index: VariableIndex, model: PowerFlowModel, *, objective: bool = True) -> Emission:
    """All device rows, constraints and objective terms of the power flow."""
    _check_profiles(model, index.horizon)
    rows: list[DeviceRow] = []
    constraints: list[QuadraticConstraint] = []
    bounds: list[BoundUpdate] = emit_generator_bounds(index, model.generators)
    for k in range(1, index.horizon + 1):
        rows += emit_ohm_line(index, model.lines, k)
        rows += emit_ohm_load(index, model.loads, k)
        caps, floor, reference = emit_voltage_constraints(index, model.limits, k)
        constraints += caps
        constraints += emit_thermal_limits(index, model.lines, k)
        bounds.append(floor)
        rows.append(reference)

    emission = attach_device_models(index, rows, constraints)
    emission.bounds.extend(bounds)
    if objective:
        terms, offset = objective_terms(index, model)
        audit_convexity(terms)
        emission.norm_terms.extend(terms)
        emission.offset += offset
    logger.debug("Power flow: %d rows, %d quadratic constraints", len(rows), len(constraints))
    return emission


@dataclasses.dataclass(frozen=True, eq=False)
class PowerFlow:
    """Constraint family of the power flow device models."""

    model: PowerFlowModel
    objective: bool = True


class PowerFlowEmitter(Emitter):
    """Emits the power flow family."""

    def visit_PowerFlow(self, family: PowerFlow) -> Emission:
        return emit_power_flow(self.index, family.model, objective=family.objective)


def bus_injections(
    net: EngineeringSystemNet,
    model: PowerFlowModel,
    u_plus: np.ndarray,
    u_minus: np.ndarray,
    transitions: np.ndarray | None = None,
) -> np.ndarray:
    """Complex current injected into every bus by the given transitions.

    Args:
        net: The net.
        model: The power flow model of the net.
        u_plus: Firing ends, shape (K, transition count).
        u_minus: Firing starts, shape (K, transition count).
        transitions: Transitions to account for. Defaults to all.

    Returns:
        Array of shape (K, bus count).
    """
    mask = np.ones(net.transition_count)
    if transitions is not None:
        mask = np.zeros(net.transition_count)
        mask[transitions] = 1.0
    places = np.concatenate([model.bus_real, model.bus_imag])
    m_plus = net.m_plus[places].toarray() * mask
    m_minus = net.m_minus[places].toarray() * mask
    flow = u_plus @ m_plus.T - u_minus @ m_minus.T
    n = model.bus_count
    return flow[:, :n] + 1j * flow[:, n:]


@dataclasses.dataclass(frozen=True)
class PowerFlowAudit:
    """Per-step KCL and power balance residuals and low-voltage buses."""

    kcl: np.ndarray
    balance: np.ndarray
    low_voltage: tuple[tuple[int, int], ...]

    def ok(self, kcl_tol: float = 1e-6, balance_tol: float = 1e-4) -> bool:
        return bool(self.kcl.max(initial=0.0) <= kcl_tol and self.balance.max(initial=0.0) <= balance_tol)


def category_power(
    net: EngineeringSystemNet,
    model: PowerFlowModel,
    u_plus: np.ndarray,
    u_minus: np.ndarray,
    voltage: np.ndarray,
) -> dict[str, np.ndarray]:
    """Complex power per step of each device category, positive for withdrawals.

    Generation is reported positive for injections. Charging covers every
    transition that touches a bus and is not an electric device.
    """
    electric = model.electric_transitions
    places = np.concatenate([model.bus_real, model.bus_imag])
    touching = np.flatnonzero(
        np.asarray((abs(net.m_plus[places]) + abs(net.m_minus[places])).sum(axis=0)).ravel()
    )
    charging = np.setdiff1d(touching, electric)
    groups = {
        "generator": (np.concatenate([model.generators.real, model.generators.imag]), 1.0),
        "solar": (np.concatenate([model.solar.real, model.solar.imag]), 1.0),
        "load": (np.concatenate([model.loads.real, model.loads.imag]), -1.0),
        "charging": (charging, -1.0),
        "loss": (np.concatenate([model.lines.real, model.lines.imag]), -1.0),
    }
    power = {}
    for name, (transitions, sign) in groups.items():
        current = bus_injections(net, model, u_plus, u_minus, transitions)
        power[name] = sign * np.sum(voltage * np.conj(current), axis=1)
    return power


def audit_power_flow(
    net: EngineeringSystemNet,
    model: PowerFlowModel,
    u_plus: np.ndarray,
    u_minus: np.ndarray,
    voltage: np.ndarray,
) -> PowerFlowAudit:
    """Checks KCL at every bus and the complex power balance at every step.

    Buses whose voltage magnitude falls below the secant floor are listed as
    (k, bus) pairs, k starting at 1.
    """
    injection = bus_injections(net, model, u_plus, u_minus)
    kcl = np.maximum(np.abs(injection.real), np.abs(injection.imag)).max(axis=1, initial=0.0)
    power = category_power(net, model, u_plus, u_minus, voltage)
    balance = power["generator"] + power["solar"] - power["load"] - power["charging"] - power["loss"]
    low = np.argwhere(np.abs(voltage) < model.limits.vr_min - 1e-9)
    audit = PowerFlowAudit(
        kcl=kcl,
        balance=np.abs(balance),
        low_voltage=tuple((int(k) + 1, int(b)) for k, b in low),
    )
    if audit.low_voltage:
        logger.warning("Voltage magnitude below %.3g at %d bus-steps", model.limits.vr_min, len(low))
    return audit
