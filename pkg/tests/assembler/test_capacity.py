"""Tests for omtepf.assembler.capacity."""

from __future__ import annotations

import numpy as np

from omtepf.assembler.boundary import Restriction
from omtepf.assembler.capacity import CapacitySpec, SumCap, TimeCap
from omtepf.petri.nets import EngineeringSystemNet


def _net() -> EngineeringSystemNet:
    return EngineeringSystemNet.from_entries(
        3, 3, plus=[(1, 0, 1.0), (2, 1, 1.0)], minus=[(0, 0, 1.0), (1, 1, 1.0)], durations=[1, 1, 0]
    )


def test_default() -> None:
    spec = CapacitySpec.default(_net())
    np.testing.assert_array_equal(spec.place_lower, np.zeros(3))
    assert np.isinf(spec.firing_upper).all()
    assert spec.time_caps == ()


def test_restrict() -> None:
    spec = CapacitySpec.default(_net()).replace(
        place_upper=np.array([1.0, 2.0, 3.0]),
        time_caps=(
            TimeCap(np.array([0, 2]), 1, 4, 1.0, "window"),
            TimeCap(np.array([1]), 1, 8, 1.0, "dropped"),
            TimeCap(np.array([0]), 7, 8, 1.0, "outside"),
        ),
        sum_caps=(
            SumCap(np.array([0, 1, 2]), np.array([1.0, 2.0, 3.0]), 5.0, "lot"),
            SumCap(np.array([0]), np.array([1.0]), 1.0, "ranged", first_step=2, last_step=3),
        ),
    )
    restriction = Restriction(
        places=np.array([2, 0]),
        transitions=np.array([2, 0]),
        operands=np.zeros(0, dtype=np.int64),
        first=3,
        last=7,
        global_horizon=8,
    )
    local = spec.restrict(restriction)
    np.testing.assert_array_equal(local.place_upper, [3.0, 1.0])
    assert [cap.tag for cap in local.time_caps] == ["window"]
    window = local.time_caps[0]
    np.testing.assert_array_equal(window.transitions, [1, 0])
    assert (window.first_step, window.last_step) == (1, 2)

    lot, ranged = local.sum_caps
    np.testing.assert_array_equal(lot.transitions, [1, 0])
    np.testing.assert_array_equal(lot.coefficients, [1.0, 3.0])
    assert lot.first_step is None
    assert lot.last_step is None
    assert (ranged.first_step, ranged.last_step) == (1, 1)
