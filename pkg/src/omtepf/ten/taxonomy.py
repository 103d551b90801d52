"""Operands, buffers and capabilities of the transportation-electricity nexus."""

from __future__ import annotations

import dataclasses
import enum

from omtepf.exceptions import DomainError


class Family(str, enum.Enum):
    """Capability families.

    Electric families act on current operands, transportation families move
    vehicles, and charging families do both.
    """

    EGC = "E_EGC"
    EGS = "E_EGS"
    EDS = "E_EDS"
    ET = "E_ET"
    TP = "E_TP"
    TT = "E_TT"
    CW_HOME = "E_CW_home"
    CW_WORK = "E_CW_work"
    CR = "E_CR"


ELECTRIC_FAMILIES = frozenset({Family.EGC, Family.EGS, Family.EDS, Family.ET})
TRANSPORT_FAMILIES = frozenset({Family.TP, Family.TT})
CHARGING_FAMILIES = frozenset({Family.CW_HOME, Family.CW_WORK, Family.CR})
VEHICLE_FAMILIES = TRANSPORT_FAMILIES | CHARGING_FAMILIES
# Wireless charging happens while driving.
DRIVING_FAMILIES = frozenset({Family.TT, Family.CR})

_DRAWS = {
    Family.CW_HOME: complex(0.9, 0.44),
    Family.CW_WORK: complex(1.8, 0.88),
    Family.CR: complex(3.6, 1.76),
}


def charging_draw(family: Family) -> complex:
    """Per-unit current drawn from the bus by one charging capability.

    Raises:
        DomainError: The family does not charge vehicles.
    """
    try:
        return _DRAWS[Family(family)]
    except KeyError:
        raise DomainError(f"{Family(family).value} is not a charging family") from None


class OperandKind(str, enum.Enum):
    CURRENT_REAL = "current-real"
    CURRENT_IMAG = "current-imag"
    EV = "ev"


@dataclasses.dataclass(frozen=True)
class TENOperand:
    kind: OperandKind
    ev_id: int | None = None

    def __post_init__(self) -> None:
        if (self.kind is OperandKind.EV) != (self.ev_id is not None):
            raise ValueError(f"ev_id must be given exactly for vehicle operands: {self}")


class BufferRole(str, enum.Enum):
    NEIGHBORHOOD = "neighborhood"
    COMMERCIAL_CENTER = "commercial-center"
    GENERATOR_NODE = "generator-node"
    INTERSECTION = "intersection"


class Facility(str, enum.Enum):
    PARKING = "parking"
    HOME_CHARGER = "home-charger"
    COMMERCIAL_CHARGER = "commercial-charger"
    BUS = "bus"
    SOLAR = "solar"
    LOAD = "load"
    GENERATOR = "generator"


@dataclasses.dataclass(frozen=True)
class TENBuffer:
    """A place where operands can be held: a neighborhood, a center or a node."""

    id: int
    role: BufferRole
    facilities: frozenset[Facility]

    def has(self, facility: Facility) -> bool:
        return facility in self.facilities


class Part(str, enum.Enum):
    """Real or imaginary part of an electric capability."""

    REAL = "R"
    IMAG = "I"


@dataclasses.dataclass(frozen=True)
class Capability:
    """One transition of the engineering system net.

    Args:
        index: Column of the transition in the incidence matrices.
        family: Capability family.
        ev: Vehicle of vehicle-differentiated families.
        part: Current part of electric families.
        buffer: Bus or lot of located capabilities.
        origin: Departure buffer of roads, lines and wireless charging.
        destination: Arrival buffer of roads, lines and wireless charging.
        line: Position of the line in the line list.
        duration: Duration in steps.
        rate: Charge units gained (positive) or spent (negative) per firing.
        spent: Charge units a charging trip spends driving its road.
        draw: Complex current drawn from the bus by charging capabilities.
    """

    index: int
    family: Family
    ev: int | None = None
    part: Part | None = None
    buffer: int | None = None
    origin: int | None = None
    destination: int | None = None
    line: int | None = None
    duration: int = 0
    rate: float = 0.0
    spent: float = 0.0
    draw: complex = 0j

    @property
    def soc_change(self) -> float:
        return self.rate - self.spent

    @property
    def name(self) -> str:
        if self.part is not None:
            where = (
                f"{self.origin}->{self.destination}" if self.origin is not None else self.buffer
            )
            return f"{self.family.value}[{self.part.value}:{where}]"
        if self.origin is not None:
            return f"{self.family.value}[ev{self.ev}:{self.origin}->{self.destination}]"
        return f"{self.family.value}[ev{self.ev}@{self.buffer}]"
