"""Omtepf root package."""

# ruff: noqa: PLC0414

try:
    from omtepf import _version

    __version__ = _version.__version__
except ImportError:
    __version__ = ""

from omtepf.config import (
    ScenarioConfig as ScenarioConfig,
)
from omtepf.config import (
    ScenarioKind as ScenarioKind,
)
from omtepf.config import (
    SolverOptions as SolverOptions,
)
from omtepf.frontend import (
    compare as compare,
)
from omtepf.frontend import (
    load_model as load_model,
)
from omtepf.frontend import (
    run_scenario as run_scenario,
)
from omtepf.scenarios.report import (
    write_report as write_report,
)
from omtepf.ten.builder import (
    build_mini as build_mini,
)
from omtepf.ten.builder import (
    build_model as build_model,
)
from omtepf.ten.builder import (
    build_symmetrica as build_symmetrica,
)
