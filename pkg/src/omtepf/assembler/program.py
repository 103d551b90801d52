"""Assembly of a complete program from a ProgramSpec."""

from __future__ import annotations

import dataclasses
import logging
from typing import TYPE_CHECKING

from omtepf.assembler import families
from omtepf.assembler.naming import column_names
from omtepf.assembler.plugin_stack import _default_stack
from omtepf.assembler.problem import ProblemBuilder
from omtepf.assembler.variable_index import index_variables
from omtepf.transformers.integrality import IntegralityRelaxer
from omtepf.transformers.quartic_epigraph import QuarticEpigraph

if TYPE_CHECKING:
    from collections.abc import Mapping, Sequence

    from omtepf.assembler.boundary import BoundaryData, SyncMatrix
    from omtepf.assembler.capacity import CapacitySpec
    from omtepf.assembler.plugin import Emitter
    from omtepf.assembler.problem import ProblemMatrices
    from omtepf.petri.nets import EngineeringSystemNet, OperandNet

logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True, eq=False)
class ProgramSpec:
    """Everything needed to assemble one HFNMCF program.

    Args:
        net: The engineering system net.
        operand_nets: Operand nets, may be empty.
        horizon: Number of time steps K.
        boundary: Pins and initial/final conditions.
        sync: Operand/net firing coupling.
        capacity: Bounds and caps.
        costs: Linear objective terms.
        device_vars: Auxiliary families (name to size per step) used by device models.
        device_families: Extra constraint families, dispatched to `emitter_types`.
        emitter_types: Emitter classes instantiated in front of the core emitter.
        dt: Step length.
        open_end: Lets firings complete after the horizon.
        label: Name used in logs and reports.
    """

    net: EngineeringSystemNet
    operand_nets: tuple[OperandNet, ...]
    horizon: int
    boundary: BoundaryData
    sync: SyncMatrix
    capacity: CapacitySpec
    costs: tuple[families.LinearCost, ...] = ()
    device_vars: Mapping[str, int] = dataclasses.field(default_factory=dict)
    device_families: tuple[object, ...] = ()
    emitter_types: tuple[type[Emitter], ...] = ()
    dt: float = 1.0
    open_end: bool = False
    label: str = "program"

    def constraint_families(self) -> list[object]:
        return [
            families.EsnDynamics(self.net, self.dt),
            families.TransitionDurations(self.net, self.boundary.initial_q_e, self.open_end),
            families.OperandDynamics(self.operand_nets, self.dt),
            families.Synchronization(self.sync),
            families.Capacity(self.capacity),
            families.Boundary(self.boundary),
            *self.costs,
            *self.device_families,
        ]


def assemble(
    spec: ProgramSpec,
    /,
    plugins: Sequence[Emitter] | None = None,
    relax_integrality: bool = False,
    epigraph: bool = False,
    with_names: bool = True,
) -> ProblemMatrices:
    """Assembles the program a ProgramSpec describes.

    Args:
        spec: Nets, horizon, boundary, capacity and costs of the program.
        plugins: Extra emitters, consulted before the emitters of `spec`.
        relax_integrality: Drops the binary kinds of the result.
        epigraph: Rewrites quartic norm terms into epigraph form.
        with_names: Attaches LP-format column names.

    Raises:
        StructuralError: A family has no emitter or references unknown variables.
        InfeasibleBoundaryError: Pins conflict.

    Returns:
        The assembled program.
    """
    index = index_variables(spec.net, spec.operand_nets, spec.horizon, spec.device_vars)
    stack = _default_stack(index, *(plugins or []), *(t() for t in spec.emitter_types))

    builder = ProblemBuilder(index, column_names(index) if with_names else ())
    for family in spec.constraint_families():
        builder.merge(stack.visit(family))
    problem = builder.build()
    logger.info(
        "Assembled %s: %d columns, %d equality rows, %d inequality rows",
        spec.label,
        problem.column_count,
        problem.a_eq.shape[0],
        problem.a_ineq.shape[0],
    )

    transformers = [
        t
        for t in [
            epigraph and QuarticEpigraph(),
            relax_integrality and IntegralityRelaxer(),
        ]
        if t
    ]

    for transformer in transformers:
        problem = transformer.transform(problem)

    return problem
