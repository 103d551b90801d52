"""Exogenous solar current and load admittance profiles."""

from __future__ import annotations

import dataclasses
import math
from typing import TYPE_CHECKING

import numpy as np

from omtepf.ten.clock import parse_clock
from omtepf.ten.taxonomy import BufferRole, Facility

if TYPE_CHECKING:
    from omtepf.ten.clock import Horizon
    from omtepf.ten.taxonomy import TENBuffer


def reactive_ratio(power_factor: float) -> float:
    """tan(acos(pf)): imaginary over real part at the given power factor."""
    if not 0 < power_factor <= 1:
        raise ValueError(f"Power factor must be in (0, 1], got {power_factor}")
    return math.tan(math.acos(power_factor))


@dataclasses.dataclass(frozen=True)
class SolarShape:
    """Trapezoid of one solar unit's real current over the day.

    Zero before sunrise and after sunset, linear ramps to and from a plateau.
    Clock times are "HH:MM".
    """

    peak: float
    sunrise: str = "06:00"
    plateau_start: str = "10:00"
    plateau_end: str = "16:00"
    sunset: str = "20:00"
    power_factor: float = 0.9

    def __post_init__(self) -> None:
        times = self._times()
        if list(times) != sorted(times) or times[0] == times[-1]:
            raise ValueError(f"Solar times must be ordered: {times}")

    def _times(self) -> tuple[int, int, int, int]:
        rise, top = parse_clock(self.sunrise), parse_clock(self.plateau_start)
        return rise, top, parse_clock(self.plateau_end), parse_clock(self.sunset)

    def real(self, minutes: float) -> float:
        rise, top, fall, down = self._times()
        if minutes <= rise or minutes >= down:
            return 0.0
        if minutes < top:
            return self.peak * (minutes - rise) / (top - rise)
        if minutes <= fall:
            return self.peak
        return self.peak * (down - minutes) / (down - fall)

    def current(self, minutes: float) -> complex:
        real = self.real(minutes)
        return complex(real, real * reactive_ratio(self.power_factor))


def solar_profile(horizon: Horizon, shape: SolarShape) -> np.ndarray:
    """Complex current of one solar unit at the start of every firing step.

    Returns:
        Array of shape (K,).
    """
    return np.array([shape.current(horizon.minutes(k)) for k in range(1, horizon.steps + 1)])


@dataclasses.dataclass(frozen=True)
class LoadLevels:
    """Conductance level of each kind of bus.

    The commercial center consumes only during working hours; neighborhoods are
    stationary and intersections consume the least.
    """

    neighborhood: float = 0.4
    commercial: float = 1.5
    intersection: float = 0.05
    work_start: str = "08:00"
    work_end: str = "16:00"
    power_factor: float = 0.9

    def conductance(self, role: BufferRole, minutes: float) -> float:
        if role is BufferRole.NEIGHBORHOOD:
            return self.neighborhood
        if role is BufferRole.INTERSECTION:
            return self.intersection
        if role is BufferRole.COMMERCIAL_CENTER:
            working = parse_clock(self.work_start) <= minutes < parse_clock(self.work_end)
            return self.commercial if working else 0.0
        return 0.0


def load_profile(buffer: TENBuffer, horizon: Horizon, levels: LoadLevels) -> np.ndarray:
    """Complex admittance G + jB of the load of a buffer at every firing step.

    The susceptance follows the power factor, B = −G·tan(acos(pf)).

    Raises:
        ValueError: The buffer has no load.

    Returns:
        Array of shape (K,).
    """
    if not buffer.has(Facility.LOAD):
        raise ValueError(f"Buffer {buffer.id} has no load")
    ratio = reactive_ratio(levels.power_factor)
    g = np.array(
        [levels.conductance(buffer.role, horizon.minutes(k)) for k in range(1, horizon.steps + 1)]
    )
    return g - 1j * ratio * g
