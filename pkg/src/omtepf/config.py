"""Options and configuration structures."""

from __future__ import annotations

import enum
import os
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, Field, field_validator

SOLVER_COMMAND_ENV = "OMTEPF_SOLVER_COMMAND"
LOG_LEVEL_ENV = "OMTEPF_LOG_LEVEL"


class ScenarioKind(str, enum.Enum):
    """Operating scenario of the nexus."""

    UNCOORDINATED = "uncoordinated"
    COORDINATED = "coordinated"


class SolverOptions(BaseModel):
    """Tolerances and budgets shared by every solver.

    All numerical thresholds of the solve engine live here, so a single object
    decides how strict a run is.
    """

    model_config = {"frozen": True, "extra": "forbid"}

    feasibility_tol: float = Field(1e-6, gt=0, description="Residual audit tolerance.")
    lp_tol: float = Field(1e-7, gt=0, description="Primal/dual feasibility of LP solves.")
    integrality_tol: float = Field(1e-6, gt=0)
    relative_gap: float = Field(1e-6, ge=0)
    node_limit: int = Field(200_000, ge=1)
    time_limit: float = Field(1800.0, gt=0, description="Wall-clock seconds.")
    threads: int = Field(1, ge=1)
    tie_break: Literal["lowest_index", "random"] = "lowest_index"
    seed: int = 0
    ipm_tol: float = Field(1e-8, gt=0)
    ipm_max_iter: int = Field(200, ge=1)
    dc_tol: float = Field(1e-7, gt=0, description="Successive-linearization stopping tolerance.")
    dc_max_iter: int = Field(50, ge=1)

    def with_updates(self, **updates: object) -> SolverOptions:
        """Returns a copy with the given fields replaced."""
        return self.model_copy(update={k: v for k, v in updates.items() if v is not None})


class ScenarioConfig(BaseModel):
    """Configuration of a model build.

    Clock times are "HH:MM" strings on a single day.
    """

    model_config = {"frozen": True, "extra": "forbid"}

    ev_count: int | None = Field(None, ge=0, description="Defaults to the model file's fleet.")
    start: str | None = None
    end: str | None = None
    step_minutes: int | None = Field(None, gt=0)
    horizon_steps: int | None = Field(None, ge=2)
    scenario: ScenarioKind = ScenarioKind.UNCOORDINATED
    model_file: Path | None = None

    @field_validator("start", "end")
    @classmethod
    def _check_clock(cls, value: str | None) -> str | None:
        if value is None:
            return value
        hours, sep, minutes = value.partition(":")
        if not sep or not hours.isdigit() or not minutes.isdigit():
            raise ValueError(f"Invalid clock time: {value}")
        if int(hours) > 24 or int(minutes) >= 60:
            raise ValueError(f"Invalid clock time: {value}")
        return value


def solver_command_template() -> str | None:
    """Returns the external solver command template from the environment."""
    return os.environ.get(SOLVER_COMMAND_ENV) or None
