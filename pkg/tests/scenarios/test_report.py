"""Tests for omtepf.scenarios.report."""

from __future__ import annotations

import json
from typing import TYPE_CHECKING

import pandas as pd
import pytest

from omtepf.scenarios.report import (
    location_frame,
    metrics_blob,
    queue_frame,
    soc_frame,
    summary_frame,
    voltage_frame,
    write_report,
)
from omtepf.ten.builder import build_mini
from tests.utils import commute_schedule, synthetic_result

if TYPE_CHECKING:
    from pathlib import Path


def test_frames() -> None:
    model = build_mini()
    result = synthetic_result(model, commute_schedule(model))

    voltage = voltage_frame(result, model)
    assert list(voltage.columns) == ["bus_1", "bus_2", "bus_3", "bus_4"]
    assert voltage.index[0] == "06:00"
    assert voltage.index[-1] == "17:00"

    soc = soc_frame(result, model)
    assert soc.shape == (12, 2)
    assert soc.loc["08:00", "ev0"] == 16.0

    location = location_frame(result, model)
    assert location.loc["06:00", "ev0"] == "park@1"
    assert location.loc["07:00", "ev0"] == "park@1"
    assert location.loc["08:00", "ev0"] == "road 1->3"
    assert location.loc["09:00", "ev1"] == "park@3"

    queue = queue_frame(result, model)
    assert queue["buffer"].sum() == 0
    assert queue["charger"].sum() == 0


def test_summary_and_metrics() -> None:
    model = build_mini()
    result = synthetic_result(model, commute_schedule(model))
    summary = summary_frame(result)
    assert list(summary["term"]) == ["Z_TT", "Z_TQ", "Z_EGC", "Z_EGS", "Z_EC", "Z_EDS", "total"]
    assert summary["value"].iloc[-1] == pytest.approx(result.total)

    blob = metrics_blob(result)
    assert blob["scenario"] == "uncoordinated"
    assert blob["status"] == result.status.value
    assert blob["audit_ok"] is False
    assert set(blob["stages"]) == {"opf"}


def test_write_report(tmp_path: Path) -> None:
    model = build_mini()
    result = synthetic_result(model, commute_schedule(model))
    written = write_report(result, model, tmp_path / "out")
    assert sorted(p.name for p in written) == [
        "energy.csv",
        "generation.csv",
        "line_current.csv",
        "location.csv",
        "metrics.json",
        "queue.csv",
        "soc.csv",
        "summary.csv",
        "voltage.csv",
    ]
    soc = pd.read_csv(tmp_path / "out" / "soc.csv", index_col="time")
    assert soc.shape == (12, 2)
    energy = pd.read_csv(tmp_path / "out" / "energy.csv")
    assert list(energy["category"]) == ["generation", "solar", "charging", "demand"]
    metrics = json.loads((tmp_path / "out" / "metrics.json").read_text(encoding="utf-8"))
    assert metrics["metrics"]["queue_peak"] == 0
