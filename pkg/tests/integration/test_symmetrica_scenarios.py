"""End-to-end run of the uncoordinated scenario on the bundled Symmetrica model."""

from __future__ import annotations

import functools

import numpy as np
import pytest

from omtepf.config import SolverOptions
from omtepf.scenarios.result import ScenarioResult
from omtepf.scenarios.runner import run_uncoordinated
from omtepf.ten.builder import build_symmetrica

pytestmark = pytest.mark.slow

_OPTIONS = SolverOptions(time_limit=1800.0)


@functools.lru_cache(maxsize=None)
def _uncoordinated() -> ScenarioResult:
    return run_uncoordinated(build_symmetrica(), _OPTIONS)


def test_power_flow_is_feasible() -> None:
    result = _uncoordinated()
    assert result.audit.ok(_OPTIONS.feasibility_tol)
    assert (np.abs(result.voltage) <= 1.1 + 1e-6).all()
    assert (result.voltage.real >= 0.85 - 1e-6).all()
    assert np.isfinite(result.costs.generation)
    assert result.costs.generation > 0.0


def test_transport_costs() -> None:
    costs = _uncoordinated().costs
    # 16 vehicles live two roads from work and 16 live four roads away
    assert costs.transportation == pytest.approx(9.60)
    assert costs.charging == pytest.approx(-9.60)
    # half the fleet waits one step to leave work at 16:00
    assert costs.queuing == pytest.approx(0.80)


def test_evening_queue() -> None:
    result = _uncoordinated()
    assert result.metrics.queue_peak == 16
    assert result.metrics.window_queues["evening"] == 16
    assert result.metrics.window_queues["morning"] == 0
    assert result.metrics.fleet_utilization == pytest.approx(192 / (32 * 57))


def test_charge_closes() -> None:
    soc = _uncoordinated().soc
    np.testing.assert_allclose(soc[0], 18.0)
    np.testing.assert_allclose(soc[-1], 18.0, atol=1e-9)
    assert (soc >= -1e-9).all()
