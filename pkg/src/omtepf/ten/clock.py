"""Clock times and step indices."""

from __future__ import annotations

import dataclasses

from omtepf.exceptions import ConfigurationError

MINUTES_PER_DAY = 24 * 60


def parse_clock(value: str) -> int:
    """Minutes after midnight of an "HH:MM" string."""
    hours, sep, minutes = value.partition(":")
    if not sep or not hours.isdigit() or not minutes.isdigit():
        raise ValueError(f"Invalid clock time: {value}")
    total = int(hours) * 60 + int(minutes)
    if int(minutes) >= 60 or total > MINUTES_PER_DAY:
        raise ValueError(f"Invalid clock time: {value}")
    return total


def format_clock(minutes: int) -> str:
    return f"{minutes // 60:02d}:{minutes % 60:02d}"


@dataclasses.dataclass(frozen=True)
class Horizon:
    """A day split into K equal steps.

    Marking index k (1..K+1) is the clock time start + (k − 1)·step; firing index k
    (1..K) is the step that begins at that time.
    """

    start: int
    step_minutes: int
    steps: int

    @classmethod
    def from_clock(cls, start: str, end: str, step_minutes: int) -> Horizon:
        """Builds the horizon covering [start, end].

        Raises:
            ConfigurationError: The span is not a whole number of steps, or has fewer
                than two steps.
        """
        first, last = parse_clock(start), parse_clock(end)
        span = last - first
        if step_minutes <= 0 or span % step_minutes:
            raise ConfigurationError(
                f"{start}-{end} is not a whole number of {step_minutes}-minute steps"
            )
        steps = span // step_minutes
        if steps < 2:
            raise ConfigurationError(f"Horizon {start}-{end} has {steps} steps, need at least 2")
        return cls(first, step_minutes, steps)

    @property
    def end(self) -> int:
        return self.start + self.steps * self.step_minutes

    @property
    def hours_per_step(self) -> float:
        return self.step_minutes / 60

    def minutes(self, k: int) -> int:
        return self.start + (k - 1) * self.step_minutes

    def clock(self, k: int) -> str:
        return format_clock(self.minutes(k))

    def step(self, clock: str) -> int:
        """Marking index of a clock time.

        Raises:
            ConfigurationError: The time is off the step grid or outside the horizon.
        """
        offset = parse_clock(clock) - self.start
        if offset % self.step_minutes:
            raise ConfigurationError(f"{clock} is not on the {self.step_minutes}-minute grid")
        k = 1 + offset // self.step_minutes
        if not 1 <= k <= self.steps + 1:
            raise ConfigurationError(
                f"{clock} is outside {format_clock(self.start)}-{format_clock(self.end)}"
            )
        return k

    def truncate(self, steps: int) -> Horizon:
        """The first `steps` steps of this horizon."""
        if not 2 <= steps <= self.steps:
            raise ConfigurationError(f"Cannot shorten a {self.steps}-step horizon to {steps}")
        return dataclasses.replace(self, steps=steps)


@dataclasses.dataclass(frozen=True)
class TimeWindow:
    """Marking indices [first, last] of one part of the day."""

    name: str
    first: int
    last: int

    def __post_init__(self) -> None:
        if self.first > self.last:
            raise ConfigurationError(f"Window {self.name} is empty: [{self.first}, {self.last}]")

    def firing_steps(self) -> range:
        """Firing steps that start inside the window."""
        return range(self.first, self.last)

    def __contains__(self, k: object) -> bool:
        return isinstance(k, int) and self.first <= k <= self.last

    def overlaps(self, other: TimeWindow) -> bool:
        """True if the windows share a firing step."""
        return max(self.first, other.first) < min(self.last, other.last)
