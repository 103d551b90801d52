"""Boundary, initial and final conditions and the synchronization matrix."""

from __future__ import annotations

import dataclasses
from typing import TYPE_CHECKING

import numpy as np
from scipy import sparse

from omtepf.assembler.variable_index import (
    FIRING_FAMILIES,
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
from omtepf.petri.nets import OPERAND_TRANSITIONS

if TYPE_CHECKING:
    from collections.abc import Sequence

PLACE_FAMILIES = (Q_B,)
TRANSITION_FAMILIES = (Q_E, U_MINUS, U_PLUS)
OPERAND_PLACE_FAMILIES = (Q_SL,)
OPERAND_TRANSITION_FAMILIES = (Q_EL, UL_MINUS, UL_PLUS)


@dataclasses.dataclass(frozen=True)
class Pin:
    """Fixes one variable: family[k][element] = value."""

    family: str
    k: int
    element: int
    value: float
    tag: str = "pin"


@dataclasses.dataclass(frozen=True)
class SumPin:
    """Fixes a weighted sum of variables of one time index.

    Args:
        terms: (family, element, coefficient) triples.
        k: Time index shared by all terms.
        value: Right-hand side.
        tag: Provenance label.
    """

    terms: tuple[tuple[str, int, float], ...]
    k: int
    value: float
    tag: str = "sum_pin"


@dataclasses.dataclass(frozen=True, eq=False)
class Restriction:
    """Projection of global data onto a sub-net and a window of time indices.

    Global marking index `first` becomes local index 1 and `last` becomes the local
    K+1, so the local horizon is `last - first`.

    Args:
        places: Kept global place indices, in local order.
        transitions: Kept global transition indices, in local order.
        operands: Kept operand net indices, in local order.
        first: First global marking index of the window.
        last: Last global marking index of the window.
        global_horizon: K of the unrestricted program.
    """

    places: np.ndarray
    transitions: np.ndarray
    operands: np.ndarray
    first: int
    last: int
    global_horizon: int

    def __post_init__(self) -> None:
        if not 1 <= self.first < self.last <= self.global_horizon + 1:
            raise ValueError(
                f"Invalid window [{self.first}, {self.last}] for horizon {self.global_horizon}"
            )

    @property
    def horizon(self) -> int:
        return self.last - self.first

    @property
    def reaches_end(self) -> bool:
        return self.last == self.global_horizon + 1

    def local_step(self, family: str, k: int) -> int | None:
        last = self.last - 1 if family in FIRING_FAMILIES else self.last
        if not self.first <= k <= last:
            return None
        return k - self.first + 1

    def local_element(self, family: str, element: int) -> int | None:
        if family in PLACE_FAMILIES:
            return _position(self.places, element)
        if family in TRANSITION_FAMILIES:
            return _position(self.transitions, element)
        if family in OPERAND_PLACE_FAMILIES:
            return _position(self.operands, element)
        if family in OPERAND_TRANSITION_FAMILIES:
            width = len(OPERAND_TRANSITIONS)
            operand, offset = divmod(element, width)
            local = _position(self.operands, operand)
            return None if local is None else local * width + offset
        raise StructuralError(f"Cannot restrict family {family}")


@dataclasses.dataclass(frozen=True, eq=False)
class BoundaryData:
    """Exogenous pins plus initial and final conditions.

    Final arrays use NaN for free entries.
    """

    pins: tuple[Pin, ...]
    sum_pins: tuple[SumPin, ...]
    initial_q_b: np.ndarray
    initial_q_e: np.ndarray
    initial_soc: np.ndarray
    final_q_b: np.ndarray | None = None
    final_q_e: np.ndarray | None = None
    final_soc: np.ndarray | None = None

    def restrict(
        self,
        restriction: Restriction,
        *,
        q_b: np.ndarray | None = None,
        q_e: np.ndarray | None = None,
        soc: np.ndarray | None = None,
    ) -> BoundaryData:
        """Projects the data onto a sub-net and window.

        Pins on dropped elements or outside the window disappear. The initial state
        is taken from the given global vectors (a replayed state at `first`); it
        defaults to the global initial conditions. Final conditions survive only if
        the window reaches the end of the horizon.
        """
        pins = []
        for pin in self.pins:
            k = restriction.local_step(pin.family, pin.k)
            element = restriction.local_element(pin.family, pin.element)
            if k is not None and element is not None:
                pins.append(dataclasses.replace(pin, k=k, element=element))

        sum_pins = []
        for sum_pin in self.sum_pins:
            terms = []
            for family, element, coef in sum_pin.terms:
                local = restriction.local_element(family, element)
                if local is not None and restriction.local_step(family, sum_pin.k) is not None:
                    terms.append((family, local, coef))
            if terms:
                k = sum_pin.k - restriction.first + 1
                sum_pins.append(dataclasses.replace(sum_pin, terms=tuple(terms), k=k))

        q_b = self.initial_q_b if q_b is None else q_b
        q_e = self.initial_q_e if q_e is None else q_e
        soc = self.initial_soc if soc is None else soc
        final = restriction.reaches_end

        def pick(values: np.ndarray | None, kept: np.ndarray) -> np.ndarray | None:
            return None if values is None else np.asarray(values)[kept]

        return BoundaryData(
            pins=tuple(pins),
            sum_pins=tuple(sum_pins),
            initial_q_b=np.asarray(q_b)[restriction.places],
            initial_q_e=np.asarray(q_e)[restriction.transitions],
            initial_soc=np.asarray(soc)[restriction.operands],
            final_q_b=pick(self.final_q_b, restriction.places) if final else None,
            final_q_e=pick(self.final_q_e, restriction.transitions) if final else None,
            final_soc=pick(self.final_soc, restriction.operands) if final else None,
        )


@dataclasses.dataclass(frozen=True, eq=False)
class SyncMatrix:
    """Couples operand net firings to engineering system net firings.

    U_L⁻[k] = Λ̂⁻ U⁻[k]. Rows are operand transitions (three per operand net,
    in (charge, hold, discharge) order) and columns are net transitions. The
    output coupling Λ̂⁺ is kept for completeness but never emitted.
    """

    lambda_minus: sparse.csr_matrix
    lambda_plus: sparse.csr_matrix | None = None

    @classmethod
    def from_entries(
        cls,
        operand_count: int,
        transition_count: int,
        entries: Sequence[tuple[int, int, float]],
    ) -> SyncMatrix:
        """Builds Λ̂⁻ from (operand transition, net transition, rate) triples."""
        shape = (operand_count * len(OPERAND_TRANSITIONS), transition_count)
        if not entries:
            return cls(sparse.csr_matrix(shape))
        rows, cols, vals = zip(*entries)
        return cls(sparse.coo_matrix((vals, (rows, cols)), shape=shape).tocsr())

    def restrict(self, restriction: Restriction) -> SyncMatrix:
        width = len(OPERAND_TRANSITIONS)
        rows = (restriction.operands[:, None] * width + np.arange(width)).ravel()
        minus = self.lambda_minus[rows][:, restriction.transitions].tocsr()
        plus = None
        if self.lambda_plus is not None:
            plus = self.lambda_plus[rows][:, restriction.transitions].tocsr()
        return SyncMatrix(minus, plus)


def _position(kept: np.ndarray, element: int) -> int | None:
    hits = np.flatnonzero(kept == element)
    return int(hits[0]) if hits.size else None
