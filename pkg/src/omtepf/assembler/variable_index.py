"""Layout of the decision vector over the horizon."""

from __future__ import annotations

import bisect
import dataclasses
from typing import TYPE_CHECKING

import numpy as np

from omtepf.exceptions import ConfigurationError, StructuralError

if TYPE_CHECKING:
    from collections.abc import Mapping, Sequence

    from omtepf.petri.nets import EngineeringSystemNet, OperandNet

Q_B = "Q_B"
Q_E = "Q_E"
U_MINUS = "U_minus"
U_PLUS = "U_plus"
Q_SL = "Q_SL"
Q_EL = "Q_EL"
UL_MINUS = "U_L_minus"
UL_PLUS = "U_L_plus"

MARKING_FAMILIES = (Q_B, Q_E, Q_SL, Q_EL)
FIRING_FAMILIES = (U_MINUS, U_PLUS, UL_MINUS, UL_PLUS)


@dataclasses.dataclass(frozen=True, eq=False)
class FamilyRange:
    """Contiguous block of columns holding one symbol family.

    Columns are time-major inside the block: all elements of the first step, then
    all elements of the next step.
    """

    name: str
    size: int
    first_step: int
    last_step: int
    offset: int
    binary: np.ndarray
    lower: float = -np.inf
    upper: float = np.inf

    @property
    def steps(self) -> int:
        return self.last_step - self.first_step + 1

    @property
    def count(self) -> int:
        return self.size * self.steps

    @property
    def stop(self) -> int:
        return self.offset + self.count

    def column(self, k: int, element: int) -> int:
        if not self.first_step <= k <= self.last_step:
            raise StructuralError(
                f"{self.name}: step {k} outside [{self.first_step}, {self.last_step}]"
            )
        if not 0 <= element < self.size:
            raise StructuralError(f"{self.name}: element {element} outside [0, {self.size})")
        return self.offset + (k - self.first_step) * self.size + element

    def columns(self, k: int) -> np.ndarray:
        """All columns of step k."""
        start = self.column(k, 0) if self.size else self.offset
        return np.arange(start, start + self.size)

    def grid(self, steps: Sequence[int] | np.ndarray | None = None) -> np.ndarray:
        """Columns as an array of shape (len(steps), size)."""
        if steps is None:
            steps = range(self.first_step, self.last_step + 1)
        steps = np.asarray(steps, dtype=np.int64)
        return self.offset + (steps[:, None] - self.first_step) * self.size + np.arange(self.size)


@dataclasses.dataclass(frozen=True, eq=False)
class VariableIndex:
    """Maps every symbol family and time index to its columns.

    Args:
        horizon: Number of time steps K.
        families: Family ranges in column order.
    """

    horizon: int
    families: tuple[FamilyRange, ...]

    def __post_init__(self) -> None:
        expected = 0
        for family in self.families:
            if family.offset != expected:
                raise StructuralError(f"{family.name} starts at {family.offset}, expected {expected}")
            expected = family.stop

    @property
    def total(self) -> int:
        return self.families[-1].stop if self.families else 0

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(f.name for f in self.families)

    def __contains__(self, name: object) -> bool:
        return any(f.name == name for f in self.families)

    def __getitem__(self, name: str) -> FamilyRange:
        for family in self.families:
            if family.name == name:
                return family
        raise StructuralError(f"Unregistered variable family: {name}")

    def column(self, name: str, k: int, element: int) -> int:
        return self[name].column(k, element)

    def binary_mask(self) -> np.ndarray:
        mask = np.zeros(self.total, dtype=bool)
        for family in self.families:
            mask[family.offset : family.stop] = np.tile(family.binary, family.steps)
        return mask

    def default_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        """Family default bounds; binary columns are clipped to [0, 1]."""
        lower = np.empty(self.total)
        upper = np.empty(self.total)
        for family in self.families:
            lower[family.offset : family.stop] = family.lower
            upper[family.offset : family.stop] = family.upper
        binary = self.binary_mask()
        lower[binary] = np.maximum(lower[binary], 0.0)
        upper[binary] = np.minimum(upper[binary], 1.0)
        return lower, upper

    def values(self, x: np.ndarray, name: str) -> np.ndarray:
        """Slices a solution vector into a (steps, size) array of one family."""
        family = self[name]
        return np.asarray(x[family.offset : family.stop]).reshape(family.steps, family.size)

    def locate(self, column: int) -> tuple[str, int, int]:
        """Inverse of `column`: returns (family, k, element)."""
        if not 0 <= column < self.total:
            raise StructuralError(f"Column {column} outside [0, {self.total})")
        starts = [f.offset for f in self.families]
        family = self.families[bisect.bisect_right(starts, column) - 1]
        while family.count == 0:
            family = self.families[self.families.index(family) + 1]
        step, element = divmod(column - family.offset, family.size)
        return family.name, family.first_step + step, element

    def extend(
        self,
        name: str,
        size: int,
        *,
        first_step: int = 0,
        last_step: int = 0,
        lower: float = -np.inf,
        upper: float = np.inf,
    ) -> VariableIndex:
        """Returns a new index with one more family appended."""
        if name in self:
            raise StructuralError(f"Variable family {name} already registered")
        family = FamilyRange(
            name=name,
            size=size,
            first_step=first_step,
            last_step=last_step,
            offset=self.total,
            binary=np.zeros(size, dtype=bool),
            lower=lower,
            upper=upper,
        )
        return VariableIndex(self.horizon, (*self.families, family))


def index_variables(
    net: EngineeringSystemNet,
    operand_nets: Sequence[OperandNet],
    horizon: int,
    device_vars: Mapping[str, int] | None = None,
) -> VariableIndex:
    """Lays out the decision vector of an HFNMCF program.

    Markings are indexed 1..K+1 and firings 1..K. Families appear in the order
    Q_B, Q_E, U⁻, U⁺, then the operand-net families, then the device families in
    the order given.

    Args:
        net: The engineering system net.
        operand_nets: Operand nets, one place and three transitions each.
        horizon: Number of time steps K.
        device_vars: Auxiliary families, name to size per step. Device variables are
            continuous and unbounded by default.

    Raises:
        ConfigurationError: horizon < 2.

    Returns:
        The index.
    """
    if horizon < 2:
        raise ConfigurationError(f"Horizon must be at least 2 steps, got {horizon}")

    families: list[FamilyRange] = []

    def add(name: str, size: int, last_step: int, binary: np.ndarray) -> None:
        offset = families[-1].stop if families else 0
        families.append(FamilyRange(name, size, 1, last_step, offset, binary))

    add(Q_B, net.place_count, horizon + 1, net.binary_places.copy())
    add(Q_E, net.transition_count, horizon + 1, net.binary_transitions.copy())
    add(U_MINUS, net.transition_count, horizon, net.binary_transitions.copy())
    add(U_PLUS, net.transition_count, horizon, net.binary_transitions.copy())

    if operand_nets:
        places = sum(op.place_count for op in operand_nets)
        transitions = sum(op.transition_count for op in operand_nets)
        add(Q_SL, places, horizon + 1, np.zeros(places, dtype=bool))
        add(Q_EL, transitions, horizon + 1, np.zeros(transitions, dtype=bool))
        add(UL_MINUS, transitions, horizon, np.zeros(transitions, dtype=bool))
        add(UL_PLUS, transitions, horizon, np.zeros(transitions, dtype=bool))

    for name, size in (device_vars or {}).items():
        add(name, size, horizon, np.zeros(size, dtype=bool))

    return VariableIndex(horizon, tuple(families))
