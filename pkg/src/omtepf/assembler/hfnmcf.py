"""Rows of the hetero-functional network minimum cost flow program.

Every emitter returns an `Emission` over one `VariableIndex`. Blocks are built per
family with sparse Kronecker products over the time steps, so a block row order is
(k, element).
"""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np
from scipy import sparse

from omtepf.assembler.families import DeviceRow
from omtepf.assembler.plugin import Emitter
from omtepf.assembler.problem import BoundUpdate, Emission, RowSet, RowTag
from omtepf.assembler.variable_index import (
    Q_B,
    Q_E,
    Q_EL,
    Q_SL,
    U_MINUS,
    U_PLUS,
    UL_MINUS,
    UL_PLUS,
)
from omtepf.exceptions import StructuralError

if TYPE_CHECKING:
    from collections.abc import Sequence

    from omtepf.assembler import families
    from omtepf.assembler.boundary import BoundaryData, SyncMatrix
    from omtepf.assembler.capacity import CapacitySpec
    from omtepf.assembler.problem import QuadraticConstraint
    from omtepf.assembler.variable_index import VariableIndex
    from omtepf.petri.nets import EngineeringSystemNet, OperandNet

logger = logging.getLogger(__name__)


def _embed(
    index: VariableIndex, family: str, first_k: int, steps: int, matrix: sparse.spmatrix
) -> sparse.coo_matrix:
    """Places `matrix` on the columns of `family` for steps first_k..first_k+steps-1."""
    fam = index[family]
    block = sparse.kron(sparse.identity(steps), sparse.csr_matrix(matrix), format="coo")
    start = fam.offset + (first_k - fam.first_step) * fam.size
    return sparse.coo_matrix(
        (block.data, (block.row, block.col + start)), shape=(block.shape[0], index.total)
    )


def _tags(family: str, first_k: int, steps: int, elements: Sequence[int]) -> list[RowTag]:
    return [RowTag(family, k, int(e)) for k in range(first_k, first_k + steps) for e in elements]


def _selector(rows: np.ndarray, size: int) -> sparse.csr_matrix:
    return sparse.csr_matrix(
        (np.ones(len(rows)), (np.arange(len(rows)), rows)), shape=(len(rows), size)
    )


def _columns(index: VariableIndex, family: str, steps: Sequence[int], elements: np.ndarray) -> np.ndarray:
    return index[family].grid(steps)[:, elements].ravel()


def emit_esn_dynamics(index: VariableIndex, net: EngineeringSystemNet, dt: float = 1.0) -> Emission:
    """Marking recursion of the engineering system net.

    One row per place per k, one row per timed transition per k. Transition
    markings of instantaneous transitions are pinned to zero instead.
    """
    horizon = index.horizon
    places = net.place_count
    eye = sparse.identity(places, format="csr")
    place_rows = RowSet(index.total)
    matrix = (
        _embed(index, Q_B, 2, horizon, eye)
        - _embed(index, Q_B, 1, horizon, eye)
        - dt * _embed(index, U_PLUS, 1, horizon, net.m_plus)
        + dt * _embed(index, U_MINUS, 1, horizon, net.m_minus)
    )
    place_rows.add_block(matrix, 0.0, 0.0, _tags("esn_places", 1, horizon, range(places)))

    emission = Emission.of_rows(place_rows.block("eq"))

    timed = np.flatnonzero(net.durations > 0)
    if timed.size:
        select = _selector(timed, net.transition_count)
        transition_rows = RowSet(index.total)
        matrix = (
            _embed(index, Q_E, 2, horizon, select)
            - _embed(index, Q_E, 1, horizon, select)
            + dt * _embed(index, U_PLUS, 1, horizon, select)
            - dt * _embed(index, U_MINUS, 1, horizon, select)
        )
        transition_rows.add_block(matrix, 0.0, 0.0, _tags("esn_transitions", 1, horizon, timed))
        emission.merge(Emission.of_rows(transition_rows.block("eq")))

    instantaneous = np.flatnonzero(net.durations == 0)
    if instantaneous.size:
        columns = _columns(index, Q_E, range(1, horizon + 2), instantaneous)
        emission.bounds.append(BoundUpdate.fix(columns, 0.0, "instantaneous_q_e"))
    return emission


def emit_duration_constraints(
    index: VariableIndex,
    net: EngineeringSystemNet,
    initial_q_e: np.ndarray | None = None,
    *,
    open_end: bool = False,
) -> Emission:
    """U⁺[k + d] = U⁻[k] for every transition of duration d.

    Firings that would complete after K are pinned to zero unless `open_end`.
    Transitions in progress at k = 1 (initial Q_E) complete at k = d; no other
    transition completes before d.
    """
    horizon = index.horizon
    transitions = net.transition_count
    initial_q_e = np.zeros(transitions) if initial_q_e is None else np.asarray(initial_q_e)
    rows = RowSet(index.total)
    emission = Emission()

    for duration in np.unique(net.durations).tolist():
        group = np.flatnonzero(net.durations == duration)
        select = _selector(group, transitions)
        steps = horizon - duration
        if steps > 0:
            matrix = _embed(index, U_PLUS, 1 + duration, steps, select) - _embed(
                index, U_MINUS, 1, steps, select
            )
            rows.add_block(matrix, 0.0, 0.0, _tags("durations", 1, steps, group))
        if duration == 0:
            continue
        if not open_end:
            tail = range(max(steps, 0) + 1, horizon + 1)
            if len(tail):
                emission.bounds.append(
                    BoundUpdate.fix(_columns(index, U_MINUS, tail, group), 0.0, "completion_after_horizon")
                )
        head = range(1, min(duration, horizon + 1))
        if len(head):
            emission.bounds.append(
                BoundUpdate.fix(_columns(index, U_PLUS, head, group), 0.0, "completion_before_start")
            )
        if duration <= horizon:
            emission.bounds.append(
                BoundUpdate.fix(
                    _columns(index, U_PLUS, [duration], group), initial_q_e[group], "in_progress"
                )
            )

    return emission.merge(Emission.of_rows(rows.block("eq")))


def emit_operand_dynamics(
    index: VariableIndex, operand_nets: Sequence[OperandNet], dt: float = 1.0
) -> Emission:
    """State of charge recursion of every operand net.

    Operand transitions are instantaneous: U_L⁺ = U_L⁻ and Q_EL is pinned to zero.
    The state of charge stays in [0, capacity] and operand firings are nonnegative.
    """
    if not operand_nets:
        return Emission()
    horizon = index.horizon
    count = len(operand_nets)
    eye = sparse.identity(count)
    m_plus = sparse.kron(eye, operand_nets[0].m_plus, format="csr")
    m_minus = sparse.kron(eye, operand_nets[0].m_minus, format="csr")
    width = m_plus.shape[1]

    soc_rows = RowSet(index.total)
    matrix = (
        _embed(index, Q_SL, 2, horizon, eye)
        - _embed(index, Q_SL, 1, horizon, eye)
        - dt * _embed(index, UL_PLUS, 1, horizon, m_plus)
        + dt * _embed(index, UL_MINUS, 1, horizon, m_minus)
    )
    soc_rows.add_block(matrix, 0.0, 0.0, _tags("operand_soc", 1, horizon, range(count)))

    duration_rows = RowSet(index.total)
    ident = sparse.identity(width)
    matrix = _embed(index, UL_PLUS, 1, horizon, ident) - _embed(index, UL_MINUS, 1, horizon, ident)
    duration_rows.add_block(matrix, 0.0, 0.0, _tags("operand_durations", 1, horizon, range(width)))

    emission = Emission.of_rows(soc_rows.block("eq"), duration_rows.block("eq"))
    capacity = np.array([op.capacity for op in operand_nets])
    soc = index[Q_SL]
    emission.bounds.append(
        BoundUpdate.range(
            np.arange(soc.offset, soc.stop), 0.0, np.tile(capacity, soc.steps), "soc_range"
        )
    )
    for family in (UL_MINUS, UL_PLUS):
        fam = index[family]
        emission.bounds.append(
            BoundUpdate.range(np.arange(fam.offset, fam.stop), 0.0, np.inf, "operand_firing")
        )
    q_el = index[Q_EL]
    emission.bounds.append(BoundUpdate.fix(np.arange(q_el.offset, q_el.stop), 0.0, "operand_q_e"))
    return emission


def emit_synchronization(index: VariableIndex, sync: SyncMatrix) -> Emission:
    """U_L⁻[k] = Λ̂⁻ U⁻[k] for every k.

    The output coupling is redundant with the operand durations and is not emitted.
    """
    if UL_MINUS not in index:
        if sync.lambda_minus.shape[0]:
            raise StructuralError("Synchronization given but no operand nets are indexed")
        return Emission()
    horizon = index.horizon
    rows = sync.lambda_minus.shape[0]
    if rows != index[UL_MINUS].size:
        raise StructuralError(
            f"Synchronization has {rows} rows, expected {index[UL_MINUS].size}"
        )
    row_set = RowSet(index.total)
    matrix = _embed(index, UL_MINUS, 1, horizon, sparse.identity(rows)) - _embed(
        index, U_MINUS, 1, horizon, sync.lambda_minus
    )
    row_set.add_block(matrix, 0.0, 0.0, _tags("synchronization", 1, horizon, range(rows)))
    return Emission.of_rows(row_set.block("eq"))


def emit_boundary(index: VariableIndex, boundary: BoundaryData) -> Emission:
    """Pins exogenous values and the initial and final conditions.

    Raises:
        StructuralError: A pin references a missing family, step or element.
        InfeasibleBoundaryError: Raised later by the builder if pins conflict.
    """
    horizon = index.horizon
    emission = Emission()

    grouped: dict[str, tuple[list[int], list[float]]] = {}
    for pin in boundary.pins:
        columns, values = grouped.setdefault(pin.tag, ([], []))
        columns.append(index.column(pin.family, pin.k, pin.element))
        values.append(pin.value)
    for tag, (columns, values) in grouped.items():
        emission.bounds.append(BoundUpdate.fix(columns, np.asarray(values), tag))

    if boundary.sum_pins:
        rows = RowSet(index.total)
        for sum_pin in boundary.sum_pins:
            columns = [index.column(f, sum_pin.k, e) for f, e, _ in sum_pin.terms]
            coefficients = [c for _, _, c in sum_pin.terms]
            rows.add_row(
                columns, coefficients, sum_pin.value, sum_pin.value,
                RowTag(sum_pin.tag, sum_pin.k, sum_pin.terms[0][1]),
            )
        emission.rows.append(rows.block("eq"))

    def pin_vector(family: str, k: int, values: np.ndarray | None, tag: str) -> None:
        if values is None or family not in index:
            return
        values = np.asarray(values, dtype=float)
        if values.shape != (index[family].size,):
            raise StructuralError(
                f"{tag} has shape {values.shape}, expected ({index[family].size},)"
            )
        keep = ~np.isnan(values)
        columns = index[family].columns(k)[keep]
        if columns.size:
            emission.bounds.append(BoundUpdate.fix(columns, values[keep], tag))

    pin_vector(Q_B, 1, boundary.initial_q_b, "initial_q_b")
    pin_vector(Q_E, 1, boundary.initial_q_e, "initial_q_e")
    pin_vector(Q_SL, 1, boundary.initial_soc, "initial_soc")
    pin_vector(Q_B, horizon + 1, boundary.final_q_b, "final_q_b")
    pin_vector(Q_E, horizon + 1, boundary.final_q_e, "final_q_e")
    pin_vector(Q_SL, horizon + 1, boundary.final_soc, "final_soc")
    return emission


def emit_capacity(index: VariableIndex, capacity: CapacitySpec) -> Emission:
    """Variable bounds, time-varying caps and summed-row caps."""
    horizon = index.horizon
    emission = Emission()

    def tile(family: str, lower: np.ndarray, upper: np.ndarray, tag: str) -> None:
        fam = index[family]
        emission.bounds.append(
            BoundUpdate.range(
                np.arange(fam.offset, fam.stop),
                np.tile(lower, fam.steps),
                np.tile(upper, fam.steps),
                tag,
            )
        )

    tile(Q_B, capacity.place_lower, capacity.place_upper, "place_capacity")
    tile(Q_E, capacity.q_e_lower, capacity.q_e_upper, "transition_capacity")
    tile(U_MINUS, capacity.firing_lower, capacity.firing_upper, "firing_capacity")
    tile(U_PLUS, capacity.firing_lower, capacity.firing_upper, "firing_capacity")

    for cap in capacity.time_caps:
        first, last = max(cap.first_step, 1), min(cap.last_step, horizon)
        if first > last:
            continue
        columns = _columns(index, U_MINUS, range(first, last + 1), cap.transitions)
        emission.bounds.append(BoundUpdate.range(columns, -np.inf, cap.upper, cap.tag))

    if capacity.sum_caps:
        rows = RowSet(index.total)
        for cap in capacity.sum_caps:
            fam = index[cap.family]
            first = fam.first_step if cap.first_step is None else max(cap.first_step, fam.first_step)
            last = horizon if cap.last_step is None else min(cap.last_step, horizon)
            steps = last - first + 1
            if steps <= 0:
                continue
            row = sparse.csr_matrix(
                (cap.coefficients, (np.zeros(len(cap.transitions)), cap.transitions)),
                shape=(1, fam.size),
            )
            rows.add_block(
                _embed(index, cap.family, first, steps, row),
                -np.inf,
                cap.upper,
                [RowTag(cap.tag, k, int(cap.transitions[0])) for k in range(first, last + 1)],
            )
        emission.rows.append(rows.block("ineq"))
    return emission


def emit_linear_cost(index: VariableIndex, cost: families.LinearCost) -> Emission:
    fam = index[cost.family]
    first = 1 if cost.first_step is None else cost.first_step
    last = index.horizon if cost.last_step is None else cost.last_step
    coefficients = np.asarray(cost.coefficients, dtype=float)
    if coefficients.shape != (fam.size,):
        raise StructuralError(
            f"Cost {cost.tag} has {coefficients.shape} coefficients, expected ({fam.size},)"
        )
    steps = range(first, last + 1)
    columns = fam.grid(steps).ravel()
    return Emission(linear=[(columns, np.tile(coefficients, len(steps)))])


def attach_device_models(
    index: VariableIndex,
    rows: Sequence[DeviceRow],
    constraints: Sequence[QuadraticConstraint] = (),
) -> Emission:
    """Appends device-model rows and convex constraints supplied by a device module.

    Raises:
        StructuralError: A row or constraint references a variable that is not
            registered in the index.
    """
    eq = RowSet(index.total)
    ineq = RowSet(index.total)
    for row in rows:
        columns = [index.column(f, k, e) for f, k, e, _ in row.terms]
        coefficients = [c for *_, c in row.terms]
        target = eq if row.lower == row.upper else ineq
        target.add_row(columns, coefficients, row.lower, row.upper, RowTag(row.tag, row.k, row.element))
    for constraint in constraints:
        referenced = [*constraint.squares, *(col for col, _ in constraint.linear)]
        if any(not 0 <= col < index.total for col in referenced):
            raise StructuralError(f"Constraint {constraint.tag} references an unregistered column")
    emission = Emission.of_rows(eq.block("eq"), ineq.block("ineq"))
    emission.quadratic_constraints.extend(constraints)
    return emission


class HfnmcfEmitter(Emitter):
    """Core emitter of the network flow constraint families."""

    def visit_EsnDynamics(self, family: families.EsnDynamics) -> Emission:
        return emit_esn_dynamics(self.index, family.net, family.dt)

    def visit_TransitionDurations(self, family: families.TransitionDurations) -> Emission:
        return emit_duration_constraints(
            self.index, family.net, family.initial_q_e, open_end=family.open_end
        )

    def visit_OperandDynamics(self, family: families.OperandDynamics) -> Emission:
        return emit_operand_dynamics(self.index, family.operand_nets, family.dt)

    def visit_Synchronization(self, family: families.Synchronization) -> Emission:
        return emit_synchronization(self.index, family.sync)

    def visit_Boundary(self, family: families.Boundary) -> Emission:
        return emit_boundary(self.index, family.boundary)

    def visit_Capacity(self, family: families.Capacity) -> Emission:
        return emit_capacity(self.index, family.capacity)

    def visit_LinearCost(self, family: families.LinearCost) -> Emission:
        return emit_linear_cost(self.index, family)

    def visit_DeviceModels(self, family: families.DeviceModels) -> Emission:
        logger.debug("Attaching %d device rows", len(family.rows))
        return attach_device_models(self.index, family.rows, family.constraints)
