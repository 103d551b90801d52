"""Constraint families: descriptors dispatched to emitters by class name."""

from __future__ import annotations

import dataclasses
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from collections.abc import Sequence

    from omtepf.assembler.boundary import BoundaryData, SyncMatrix
    from omtepf.assembler.capacity import CapacitySpec
    from omtepf.assembler.problem import QuadraticConstraint
    from omtepf.petri.nets import EngineeringSystemNet, OperandNet


@dataclasses.dataclass(frozen=True, eq=False)
class EsnDynamics:
    net: EngineeringSystemNet
    dt: float = 1.0


@dataclasses.dataclass(frozen=True, eq=False)
class TransitionDurations:
    """Duration rows.

    Args:
        net: The net.
        initial_q_e: Transition marking at k = 1; in-progress transitions end at k = d.
        open_end: Lets firings complete after the horizon instead of forcing them to zero.
    """

    net: EngineeringSystemNet
    initial_q_e: np.ndarray
    open_end: bool = False


@dataclasses.dataclass(frozen=True, eq=False)
class OperandDynamics:
    operand_nets: tuple[OperandNet, ...]
    dt: float = 1.0


@dataclasses.dataclass(frozen=True, eq=False)
class Synchronization:
    sync: SyncMatrix


@dataclasses.dataclass(frozen=True, eq=False)
class Boundary:
    boundary: BoundaryData


@dataclasses.dataclass(frozen=True, eq=False)
class Capacity:
    capacity: CapacitySpec


@dataclasses.dataclass(frozen=True, eq=False)
class LinearCost:
    """Σ_k coefficientsᵀ family[k] over the given step range.

    A step range of None runs over the firing steps 1..K.
    """

    family: str
    coefficients: np.ndarray
    tag: str
    first_step: int | None = None
    last_step: int | None = None


@dataclasses.dataclass(frozen=True)
class DeviceRow:
    """A device-model row over named variables.

    Args:
        terms: (family, k, element, coefficient) quadruples.
        lower: Row lower bound.
        upper: Row upper bound.
        tag: Constraint family of the row.
        k: Time index of the row.
        element: Element of the row inside its family.
    """

    terms: tuple[tuple[str, int, int, float], ...]
    lower: float
    upper: float
    tag: str
    k: int
    element: int | str = 0


@dataclasses.dataclass(frozen=True, eq=False)
class DeviceModels:
    rows: Sequence[DeviceRow] = ()
    constraints: Sequence[QuadraticConstraint] = ()
