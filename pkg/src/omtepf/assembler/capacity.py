"""Capacity constraints: variable bounds, time-varying caps and summed-row caps."""

from __future__ import annotations

import dataclasses
from typing import TYPE_CHECKING

import numpy as np

from omtepf.assembler.variable_index import U_MINUS

if TYPE_CHECKING:
    from omtepf.assembler.boundary import Restriction
    from omtepf.petri.nets import EngineeringSystemNet


@dataclasses.dataclass(frozen=True)
class TimeCap:
    """Upper bound on the firing starts of some transitions over a step range."""

    transitions: np.ndarray
    first_step: int
    last_step: int
    upper: float
    tag: str = "time_cap"


@dataclasses.dataclass(frozen=True)
class SumCap:
    """Row Σ coefficient·family[k][transition] ≤ upper, for each step in range.

    A step range of None covers every firing step.
    """

    transitions: np.ndarray
    coefficients: np.ndarray
    upper: float
    tag: str = "sum_cap"
    family: str = U_MINUS
    first_step: int | None = None
    last_step: int | None = None


@dataclasses.dataclass(frozen=True, eq=False)
class CapacitySpec:
    """All capacity data of one program.

    Firing bounds apply to both U⁻ and U⁺.
    """

    place_lower: np.ndarray
    place_upper: np.ndarray
    firing_lower: np.ndarray
    firing_upper: np.ndarray
    q_e_lower: np.ndarray
    q_e_upper: np.ndarray
    time_caps: tuple[TimeCap, ...] = ()
    sum_caps: tuple[SumCap, ...] = ()

    @classmethod
    def default(cls, net: EngineeringSystemNet) -> CapacitySpec:
        """Nonnegative markings and firings, no upper bounds."""
        places, transitions = net.place_count, net.transition_count
        return cls(
            place_lower=np.zeros(places),
            place_upper=np.full(places, np.inf),
            firing_lower=np.zeros(transitions),
            firing_upper=np.full(transitions, np.inf),
            q_e_lower=np.zeros(transitions),
            q_e_upper=np.full(transitions, np.inf),
        )

    def replace(self, **changes: object) -> CapacitySpec:
        return dataclasses.replace(self, **changes)

    def restrict(self, restriction: Restriction) -> CapacitySpec:
        """Projects the caps onto a sub-net and window.

        Caps lose the dropped transitions and are clipped to the window steps.
        """
        places, transitions = restriction.places, restriction.transitions
        local = {int(t): i for i, t in enumerate(transitions.tolist())}

        def clip(first: int | None, last: int | None) -> tuple[int, int] | None:
            first = restriction.first if first is None else max(first, restriction.first)
            last = restriction.last - 1 if last is None else min(last, restriction.last - 1)
            if first > last:
                return None
            return first - restriction.first + 1, last - restriction.first + 1

        time_caps = []
        for cap in self.time_caps:
            kept = [local[t] for t in cap.transitions.tolist() if t in local]
            steps = clip(cap.first_step, cap.last_step)
            if kept and steps:
                time_caps.append(
                    dataclasses.replace(
                        cap,
                        transitions=np.asarray(kept, dtype=np.int64),
                        first_step=steps[0],
                        last_step=steps[1],
                    )
                )

        sum_caps = []
        for cap in self.sum_caps:
            mask = np.isin(cap.transitions, transitions)
            steps = clip(cap.first_step, cap.last_step)
            if mask.any() and steps:
                whole = cap.first_step is None and cap.last_step is None
                sum_caps.append(
                    dataclasses.replace(
                        cap,
                        transitions=np.asarray(
                            [local[t] for t in cap.transitions[mask].tolist()], dtype=np.int64
                        ),
                        coefficients=cap.coefficients[mask],
                        first_step=None if whole else steps[0],
                        last_step=None if whole else steps[1],
                    )
                )

        return CapacitySpec(
            place_lower=self.place_lower[places],
            place_upper=self.place_upper[places],
            firing_lower=self.firing_lower[transitions],
            firing_upper=self.firing_upper[transitions],
            q_e_lower=self.q_e_lower[transitions],
            q_e_upper=self.q_e_upper[transitions],
            time_caps=tuple(time_caps),
            sum_caps=tuple(sum_caps),
        )
