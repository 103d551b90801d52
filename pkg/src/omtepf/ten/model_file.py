"""Model files: the topology, devices and itineraries of a nexus instance.

A model file is a JSON document with a `version` field. Version 1 has the sections
clock, buffers, roads, lines, generator, capabilities, profiles, coefficients,
capacities, fleet, itineraries and voltage. The files of the bundled instances
live in `omtepf/ten/data`.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

import pydantic
from pydantic import BaseModel, Field

from omtepf.exceptions import ConfigurationError
from omtepf.ten.taxonomy import BufferRole, Facility

SUPPORTED_VERSIONS = (1,)
BUNDLED_MODELS = ("symmetrica", "mini")


class _Section(BaseModel):
    model_config = {"frozen": True, "extra": "forbid"}


class ClockSection(_Section):
    start: str = "06:00"
    end: str = "20:00"
    step_minutes: int = Field(15, gt=0)


class BufferSection(_Section):
    id: int = Field(ge=1)
    role: BufferRole
    facilities: list[Facility]


class RoadSection(_Section):
    """A two-way road; capacity counts vehicles starting per direction and step."""

    a: int
    b: int
    capacity: int = Field(ge=0)
    electrified: bool = False


class LineSection(_Section):
    from_bus: int
    to_bus: int
    conductance: float
    susceptance: float
    rating: float | None = Field(None, gt=0)


class GeneratorSection(_Section):
    bus: int
    real_max: float = Field(60.0, ge=0)
    imag_max: float = Field(60.0, ge=0)


class CapabilitySection(_Section):
    """Durations in steps and charge units per firing of the vehicle families.

    `draw_scale` multiplies the per-unit current every charging firing draws
    from its bus.
    """

    parking_duration: int = Field(1, ge=1)
    road_duration: int = Field(1, ge=1)
    charging_duration: int = Field(1, ge=1)
    road_discharge: float = Field(2.0, ge=0)
    home_rate: float = Field(1.0, ge=0)
    work_rate: float = Field(2.0, ge=0)
    wireless_rate: float = Field(2.0, ge=0)
    draw_scale: float = Field(1.0, gt=0)


class SolarSection(_Section):
    peak: float = Field(ge=0)
    sunrise: str = "06:00"
    plateau_start: str = "10:00"
    plateau_end: str = "16:00"
    sunset: str = "20:00"
    power_factor: float = Field(0.9, gt=0, le=1)


class LoadSection(_Section):
    neighborhood: float = Field(0.4, ge=0)
    commercial: float = Field(1.5, ge=0)
    intersection: float = Field(0.05, ge=0)
    work_start: str = "08:00"
    work_end: str = "16:00"
    power_factor: float = Field(0.9, gt=0, le=1)


class ProfileSection(_Section):
    solar: SolarSection
    loads: LoadSection = LoadSection()


class CostSection(_Section):
    alpha: float
    beta: float
    gamma: float = 0.0


class DemandSection(_Section):
    rho_r: float = 0.6614
    beta_r: float = 0.6826
    rho_i: float = 0.00049
    beta_i: float = 0.0433
    gamma: float = 0.0


class CoefficientSection(_Section):
    generator: CostSection = CostSection(alpha=9.486e-5, beta=0.115)
    solar: CostSection = CostSection(alpha=0.0, beta=0.0852)
    demand: DemandSection = DemandSection()
    queue: float = Field(0.05, ge=0, description="f_QBT per queued vehicle and step.")
    road: float = Field(0.05, ge=0, description="Transportation cost per vehicle on a road.")
    charging: float = Field(0.025, ge=0, description="Charging revenue per charge unit.")


class CapacitySection(_Section):
    """Vehicles charging or parked at the workplace at one time.

    Home lots and chargers serve only the vehicles living there.
    """

    work_chargers: int = Field(10, ge=0)
    work_lot: int = Field(32, ge=0)


class FleetSection(_Section):
    battery_capacity: float = Field(18.0, gt=0)
    initial_soc: float = Field(18.0, ge=0)
    final_soc: float = Field(18.0, ge=0)


class ItinerarySection(_Section):
    """Home of every vehicle, the shared workplace and the commute deadlines.

    Vehicles must reach work by `morning_end`, may leave from `evening_start` and
    must be home by `evening_end`.
    """

    work: int
    homes: list[int]
    morning_end: str = "08:00"
    evening_start: str = "16:00"
    evening_end: str = "18:00"


class VoltageSection(_Section):
    v_max: float = Field(1.1, gt=0)
    vr_min: float = Field(0.85, ge=0)


class ModelFile(_Section):
    version: int
    name: str = ""
    clock: ClockSection = ClockSection()
    buffers: list[BufferSection]
    roads: list[RoadSection]
    lines: list[LineSection]
    generator: GeneratorSection
    capabilities: CapabilitySection = CapabilitySection()
    profiles: ProfileSection
    coefficients: CoefficientSection = CoefficientSection()
    capacities: CapacitySection = CapacitySection()
    fleet: FleetSection = FleetSection()
    itineraries: ItinerarySection
    voltage: VoltageSection = VoltageSection()


def parse_model_file(data: dict[str, object]) -> ModelFile:
    """Validates the content of a model file.

    Raises:
        ConfigurationError: Unknown version or invalid content.
    """
    version = data.get("version")
    if version not in SUPPORTED_VERSIONS:
        raise ConfigurationError(
            f"Unsupported model file version {version!r}; supported: {SUPPORTED_VERSIONS}"
        )
    try:
        return ModelFile.model_validate(data)
    except pydantic.ValidationError as e:
        raise ConfigurationError(f"Invalid model file: {e}") from e


def bundled_model_path(name: str) -> Path:
    """Path of a model file shipped with the package."""
    if name not in BUNDLED_MODELS:
        raise ValueError(f"Unknown bundled model {name!r}; choose from {BUNDLED_MODELS}")
    return Path(str(resources.files("omtepf.ten") / "data" / f"{name}.json"))


def load_model_file(path: str | Path) -> ModelFile:
    """Reads a model file from disk.

    A bare bundled name such as "mini" selects the file shipped with the package.

    Raises:
        ConfigurationError: The file is not valid JSON or fails validation.
    """
    if isinstance(path, str) and path in BUNDLED_MODELS:
        path = bundled_model_path(path)
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"{path} is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise ConfigurationError(f"{path} does not hold a JSON object")
    return parse_model_file(data)
