"""Engineering system nets and operand nets."""

from __future__ import annotations

import dataclasses
import enum
from typing import TYPE_CHECKING

import numpy as np
from scipy import sparse

from omtepf.exceptions import StructuralError

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

BINARY_TOL = 1e-6


class ValueKind(enum.Enum):
    """Value domain of a place or transition marking."""

    CONTINUOUS = "continuous"
    BINARY = "binary"


@dataclasses.dataclass(frozen=True, eq=False)
class EngineeringSystemNet:
    """A timed elementary Petri net over operands held in buffers.

    Places are (operand, buffer) pairs and transitions are capabilities. Arc weights
    are embedded in the two incidence matrices.

    Args:
        m_plus: Output incidence (place_count, transition_count), CSC.
        m_minus: Input incidence (place_count, transition_count), CSC.
        durations: Duration of every transition in time steps.
        binary_places: Mask of binary-kind places.
        binary_transitions: Mask of binary-kind transitions.
        place_names: Optional labels, one per place.
        transition_names: Optional labels, one per transition.
    """

    m_plus: sparse.csc_matrix
    m_minus: sparse.csc_matrix
    durations: np.ndarray
    binary_places: np.ndarray
    binary_transitions: np.ndarray
    place_names: tuple[str, ...] = ()
    transition_names: tuple[str, ...] = ()

    @classmethod
    def from_entries(
        cls,
        place_count: int,
        transition_count: int,
        plus: Iterable[tuple[int, int, float]],
        minus: Iterable[tuple[int, int, float]],
        durations: Sequence[int] | np.ndarray,
        binary_places: Sequence[bool] | np.ndarray | None = None,
        binary_transitions: Sequence[bool] | np.ndarray | None = None,
        place_names: Sequence[str] = (),
        transition_names: Sequence[str] = (),
    ) -> EngineeringSystemNet:
        """Builds a net from (place, transition, weight) coordinate lists.

        Duplicate coordinates are summed.
        """
        shape = (place_count, transition_count)
        return cls(
            m_plus=_coo_to_csc(plus, shape),
            m_minus=_coo_to_csc(minus, shape),
            durations=np.asarray(durations, dtype=np.int64),
            binary_places=_mask(binary_places, place_count),
            binary_transitions=_mask(binary_transitions, transition_count),
            place_names=tuple(place_names),
            transition_names=tuple(transition_names),
        )

    @property
    def place_count(self) -> int:
        return self.m_plus.shape[0]

    @property
    def transition_count(self) -> int:
        return self.m_plus.shape[1]

    @property
    def incidence(self) -> sparse.csc_matrix:
        """M = M⁺ − M⁻."""
        return (self.m_plus - self.m_minus).tocsc()

    def place_kind(self, place: int) -> ValueKind:
        return ValueKind.BINARY if self.binary_places[place] else ValueKind.CONTINUOUS

    def transition_kind(self, transition: int) -> ValueKind:
        return ValueKind.BINARY if self.binary_transitions[transition] else ValueKind.CONTINUOUS

    def check_dimensions(self) -> None:
        """Raises StructuralError if any component disagrees with the incidence shape."""
        if self.m_plus.shape != self.m_minus.shape:
            raise StructuralError(
                f"Incidence shapes differ: {self.m_plus.shape} vs {self.m_minus.shape}"
            )
        checks = [
            ("durations", self.durations.shape, (self.transition_count,)),
            ("binary_places", self.binary_places.shape, (self.place_count,)),
            ("binary_transitions", self.binary_transitions.shape, (self.transition_count,)),
        ]
        for name, actual, expected in checks:
            if actual != expected:
                raise StructuralError(f"{name} has shape {actual}, expected {expected}")

    def subnet(
        self,
        places: Sequence[int] | np.ndarray,
        transitions: Sequence[int] | np.ndarray,
        *,
        zero_durations: bool = False,
        continuous: bool = False,
    ) -> EngineeringSystemNet:
        """Extracts the net induced by the given places and transitions.

        Args:
            places: Place indices to keep, in the order of the new net.
            transitions: Transition indices to keep, in the order of the new net.
            zero_durations: Makes every kept transition instantaneous.
            continuous: Marks every kept place and transition continuous.

        Returns:
            The sub-net. Arcs to dropped places disappear.
        """
        places = np.asarray(places, dtype=np.int64)
        transitions = np.asarray(transitions, dtype=np.int64)
        durations = self.durations[transitions]
        if zero_durations:
            durations = np.zeros_like(durations)
        binary_places = self.binary_places[places]
        binary_transitions = self.binary_transitions[transitions]
        if continuous:
            binary_places = np.zeros_like(binary_places)
            binary_transitions = np.zeros_like(binary_transitions)
        return EngineeringSystemNet(
            m_plus=self.m_plus[places][:, transitions].tocsc(),
            m_minus=self.m_minus[places][:, transitions].tocsc(),
            durations=durations,
            binary_places=binary_places,
            binary_transitions=binary_transitions,
            place_names=_pick(self.place_names, places),
            transition_names=_pick(self.transition_names, transitions),
        )


@dataclasses.dataclass(frozen=True)
class Marking:
    """Place and transition markings at one time index."""

    q_b: np.ndarray
    q_e: np.ndarray
    time_index: int = 1


@dataclasses.dataclass(frozen=True)
class FiringPair:
    """Input (start) and output (end) firing vectors at one time step."""

    u_minus: np.ndarray
    u_plus: np.ndarray

    @classmethod
    def zeros(cls, transition_count: int) -> FiringPair:
        return cls(np.zeros(transition_count), np.zeros(transition_count))


OPERAND_TRANSITIONS = ("charge", "hold", "discharge")


@dataclasses.dataclass(frozen=True, eq=False)
class OperandNet:
    """Three-transition net tracking the state of charge of one vehicle.

    The single place holds the state of charge. Transitions are ordered
    (charge, hold, discharge) and are instantaneous.
    """

    capacity: float
    label: str = ""

    m_plus = np.array([[1.0, 1.0, 0.0]])
    m_minus = np.array([[0.0, 1.0, 1.0]])

    @property
    def place_count(self) -> int:
        return 1

    @property
    def transition_count(self) -> int:
        return len(OPERAND_TRANSITIONS)

    @property
    def incidence(self) -> np.ndarray:
        return self.m_plus - self.m_minus


def _coo_to_csc(
    entries: Iterable[tuple[int, int, float]], shape: tuple[int, int]
) -> sparse.csc_matrix:
    entries = list(entries)
    if not entries:
        return sparse.csc_matrix(shape)
    rows, cols, vals = zip(*entries)
    return sparse.coo_matrix((vals, (rows, cols)), shape=shape).tocsc()


def _mask(values: Sequence[bool] | np.ndarray | None, size: int) -> np.ndarray:
    if values is None:
        return np.zeros(size, dtype=bool)
    return np.asarray(values, dtype=bool)


def _pick(names: tuple[str, ...], indices: np.ndarray) -> tuple[str, ...]:
    if not names:
        return ()
    return tuple(names[i] for i in indices)
