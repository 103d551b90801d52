"""Frontend interfaces of omtepf."""

from __future__ import annotations

from typing import TYPE_CHECKING

from omtepf.config import ScenarioConfig, ScenarioKind, SolverOptions
from omtepf.exceptions import OmtepfError
from omtepf.ipython_wrappers import ScenarioTable
from omtepf.scenarios.runner import run_coordinated, run_uncoordinated
from omtepf.solvers.backend import Backend
from omtepf.ten.builder import build_model
from omtepf.ten.model_file import load_model_file

if TYPE_CHECKING:
    from pathlib import Path

    from omtepf.scenarios.result import ScenarioResult
    from omtepf.ten.builder import TENModel


def load_model(model: str | Path = "symmetrica", config: ScenarioConfig | None = None) -> TENModel:
    """Builds a model from a bundled name or a model file path.

    Args:
        model: "symmetrica", "mini" or the path of a model file.
        config: Overrides of the fleet size, clock and scenario.

    Raises:
        ConfigurationError: The model file or the configuration is invalid.
    """
    config = config or ScenarioConfig()
    source = config.model_file if config.model_file is not None else model
    return build_model(load_model_file(source), config)


def run_scenario(
    model: TENModel,
    kind: ScenarioKind | str = ScenarioKind.UNCOORDINATED,
    options: SolverOptions | None = None,
    backend: Backend | str = Backend.BUILTIN,
    workdir: Path | None = None,
    warm_start: ScenarioResult | None = None,
) -> ScenarioResult:
    """Runs one operating scenario.

    Args:
        model: The model.
        kind: The scenario.
        options: Solver options.
        backend: "builtin" or "external".
        workdir: Working directory of the external backend.
        warm_start: Seed of the coordinated solve; ignored by the uncoordinated
            scenario.

    Raises:
        StageInfeasibleError: A stage returned no point.
        HeuristicConflictError: The charging heuristic broke a capacity.
    """
    kind, backend = ScenarioKind(kind), Backend(backend)
    if kind is ScenarioKind.UNCOORDINATED:
        return run_uncoordinated(model, options, backend, workdir)
    return run_coordinated(model, options, backend, workdir, warm_start)


def compare(
    model: TENModel,
    options: SolverOptions | None = None,
    backend: Backend | str = Backend.BUILTIN,
    workdir: Path | None = None,
) -> ScenarioTable:
    """Runs both scenarios and tabulates their costs.

    The uncoordinated result seeds the coordinated solve. A failing scenario is
    reported in the table instead of raising.

    Returns:
        A table keyed by scenario name, displayed as LaTeX in notebooks.
    """
    results: dict[str, ScenarioResult] = {}
    try:
        for kind in ScenarioKind:
            subdir = None if workdir is None else workdir / kind.value
            results[kind.value] = run_scenario(
                model,
                kind,
                options,
                backend,
                subdir,
                warm_start=results.get(ScenarioKind.UNCOORDINATED.value),
            )
    except OmtepfError as e:
        return ScenarioTable(results, _describe_error(e))
    return ScenarioTable(results)


def _describe_error(e: Exception) -> str:
    return f"{e.__class__.__name__}: {e!s}"
