"""Tests for omtepf.ipython_wrappers."""

# ruff: noqa: SLF001

from __future__ import annotations

from omtepf.ipython_wrappers import ScenarioTable
from omtepf.ten.builder import build_mini
from tests.utils import commute_schedule, synthetic_result


def test_scenario_table() -> None:
    model = build_mini()
    result = synthetic_result(model, commute_schedule(model))
    table = ScenarioTable({"uncoordinated": result})
    assert table["uncoordinated"] is result

    lines = str(table).splitlines()
    assert lines[0].strip() == "uncoordinated"
    assert lines[1].startswith("Transportation cost")
    assert lines[1].endswith(f"{result.costs.transportation:.4f}")
    assert lines[7].startswith("Total")
    assert "uncoordinated solar: cost" in str(table)

    latex = table._repr_latex_()
    assert latex.startswith(r"$$ \begin{array}{lr}  & \mathrm{uncoordinated} \\ ")
    assert r"\mathrm{Queuing\ cost} & 0.00" in latex
    assert latex.endswith(r" \end{array} $$")


def test_scenario_table_error() -> None:
    table = ScenarioTable({}, "StageInfeasibleError: [opf] infeasible")
    assert str(table) == "StageInfeasibleError: [opf] infeasible"
    assert table._repr_latex_() == str(table)
