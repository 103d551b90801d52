"""Tests for omtepf.cli."""

from __future__ import annotations

from typing import TYPE_CHECKING

import pytest

from omtepf import cli
from omtepf.exceptions import AuditError, StageInfeasibleError
from omtepf.solvers.types import SolveResult, SolveStatus
from tests.utils import commute_schedule, synthetic_result

if TYPE_CHECKING:
    from pathlib import Path

    from omtepf.scenarios.result import ScenarioResult
    from omtepf.ten.builder import TENModel


def test_validate(capsys: pytest.CaptureFixture[str]) -> None:
    assert cli.main(["validate", "--model", "mini"]) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert "16 places, 44 transitions (20 electric, 14 transport, 10 charging), K = 12" in out
    assert "net is valid" in out


def test_validate_missing_model(capsys: pytest.CaptureFixture[str]) -> None:
    assert cli.main(["validate", "--model", "no_such_city.json"]) == cli.EXIT_ERROR
    assert "FileNotFoundError" in capsys.readouterr().err


def test_validate_bad_fleet(capsys: pytest.CaptureFixture[str]) -> None:
    assert cli.main(["validate", "--model", "mini", "--ev-count", "3"]) == cli.EXIT_ERROR
    assert "ConfigurationError" in capsys.readouterr().err


def test_run_writes_report(
    tmp_path: Path, monkeypatch: pytest.MonkeyPatch, capsys: pytest.CaptureFixture[str]
) -> None:
    def run(model: TENModel, *args: object, **kwargs: object) -> ScenarioResult:
        return synthetic_result(model, commute_schedule(model))

    monkeypatch.setattr(cli, "run_scenario", run)
    code = cli.main(["run", "--model", "mini", "--out", str(tmp_path), "--node-limit", "10"])
    assert code == cli.EXIT_OK
    assert (tmp_path / "summary.csv").exists()
    assert capsys.readouterr().out.startswith("uncoordinated: total ")


@pytest.mark.parametrize(
    ("result", "code"),
    [
        (SolveResult.failed(SolveStatus.LIMIT, "node limit"), cli.EXIT_LIMIT),
        (SolveResult.failed(SolveStatus.INFEASIBLE, "infeasible"), cli.EXIT_INFEASIBLE),
        (None, cli.EXIT_INFEASIBLE),
    ],
)
def test_run_stage_failure(
    tmp_path: Path, monkeypatch: pytest.MonkeyPatch, result: SolveResult | None, code: int
) -> None:
    def run(*args: object, **kwargs: object) -> ScenarioResult:
        raise StageInfeasibleError("joint", "no point", result)

    monkeypatch.setattr(cli, "run_scenario", run)
    args = ["run", "--model", "mini", "--scenario", "coordinated", "--out", str(tmp_path)]
    assert cli.main(args) == code


def test_requires_command() -> None:
    with pytest.raises(SystemExit):
        cli.main([])


def test_run_failed_audit(
    tmp_path: Path, monkeypatch: pytest.MonkeyPatch, capsys: pytest.CaptureFixture[str]
) -> None:
    def run(*args: object, **kwargs: object) -> ScenarioResult:
        raise AuditError("coordinated result fails its audit")

    monkeypatch.setattr(cli, "run_scenario", run)
    args = ["run", "--model", "mini", "--scenario", "coordinated", "--out", str(tmp_path)]
    assert cli.main(args) == cli.EXIT_ERROR
    assert "AuditError" in capsys.readouterr().err
    assert not (tmp_path / "summary.csv").exists()
