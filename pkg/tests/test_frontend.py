"""Tests for omtepf.frontend."""

# ruff: noqa: SLF001

from __future__ import annotations

from typing import TYPE_CHECKING

import pytest

from omtepf import frontend
from omtepf.config import ScenarioConfig, ScenarioKind
from omtepf.exceptions import ConfigurationError, StageInfeasibleError
from omtepf.ten.model_file import bundled_model_path
from tests.utils import commute_schedule, synthetic_result

if TYPE_CHECKING:
    from collections.abc import Callable
    from pathlib import Path

    from omtepf.scenarios.result import ScenarioResult
    from omtepf.ten.builder import TENModel


def test_load_model() -> None:
    model = frontend.load_model("mini")
    assert model.model_file.name == "mini"
    assert model.kind is ScenarioKind.UNCOORDINATED

    model = frontend.load_model("mini", ScenarioConfig(ev_count=1, scenario="coordinated"))
    assert model.ev_count == 1
    assert model.kind is ScenarioKind.COORDINATED


def test_load_model_from_config_path() -> None:
    config = ScenarioConfig(model_file=bundled_model_path("mini"))
    assert frontend.load_model("symmetrica", config).model_file.name == "mini"


def test_load_model_missing_file(tmp_path: Path) -> None:
    with pytest.raises(FileNotFoundError):
        frontend.load_model(tmp_path / "missing.json")


def test_load_model_bad_config() -> None:
    with pytest.raises(ConfigurationError):
        frontend.load_model("mini", ScenarioConfig(ev_count=5))


def test_run_scenario_dispatch(monkeypatch: pytest.MonkeyPatch) -> None:
    calls = []

    def fake(name: str) -> Callable[..., str]:
        def run(model: TENModel, *args: object) -> str:
            calls.append((name, args))
            return name

        return run

    monkeypatch.setattr(frontend, "run_uncoordinated", fake("uncoordinated"))
    monkeypatch.setattr(frontend, "run_coordinated", fake("coordinated"))
    model = frontend.load_model("mini")
    assert frontend.run_scenario(model) == "uncoordinated"
    assert frontend.run_scenario(model, "coordinated", backend="external") == "coordinated"
    # the coordinated runner also receives the warm start
    assert len(calls[1][1]) == 4


def test_run_scenario_rejects_unknown_kind() -> None:
    with pytest.raises(ValueError, match="sequential"):
        frontend.run_scenario(frontend.load_model("mini"), "sequential")


def test_compare(monkeypatch: pytest.MonkeyPatch) -> None:
    model = frontend.load_model("mini")
    result = synthetic_result(model, commute_schedule(model))
    seeds: list[ScenarioResult | None] = []

    def run(
        model: TENModel, kind: ScenarioKind, *args: object, warm_start: object = None
    ) -> ScenarioResult:
        seeds.append(warm_start)
        return result

    monkeypatch.setattr(frontend, "run_scenario", run)
    table = frontend.compare(model)
    assert table["uncoordinated"] is result
    assert table["coordinated"] is result
    assert seeds == [None, result]
    assert "Queuing cost" in str(table)


def test_compare_reports_errors(monkeypatch: pytest.MonkeyPatch) -> None:
    def run(*args: object, **kwargs: object) -> ScenarioResult:
        raise StageInfeasibleError("opf", "infeasible")

    monkeypatch.setattr(frontend, "run_scenario", run)
    table = frontend.compare(frontend.load_model("mini"))
    assert str(table) == "StageInfeasibleError: [opf] infeasible"
    assert table._repr_latex_() == str(table)


def test_describe_error() -> None:
    assert frontend._describe_error(ValueError("bad")) == "ValueError: bad"
