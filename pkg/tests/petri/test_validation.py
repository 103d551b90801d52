"""Tests for omtepf.petri.validation."""

from __future__ import annotations

import numpy as np

from omtepf.petri.nets import EngineeringSystemNet
from omtepf.petri.validation import validate_net


def test_valid_net() -> None:
    net = EngineeringSystemNet.from_entries(
        2, 1, [(1, 0, 1.0)], [(0, 0, 1.0)], [1], [True, True], [True]
    )
    report = validate_net(net)
    assert report.ok
    assert str(report) == "net is valid"


def test_negative_weight() -> None:
    net = EngineeringSystemNet.from_entries(2, 1, [(1, 0, -1.0)], [(0, 0, 1.0)], [1])
    report = validate_net(net)
    assert not report.ok
    assert "negative" in str(report)


def test_non_binary_weight_between_binary_elements() -> None:
    net = EngineeringSystemNet.from_entries(
        2, 1, [(1, 0, 2.0)], [(0, 0, 1.0)], [1], [True, True], [True]
    )
    assert "not a binary weight" in str(validate_net(net))


def test_continuous_rows_may_carry_any_weight() -> None:
    net = EngineeringSystemNet.from_entries(
        2, 1, [(1, 0, 2.5)], [(0, 0, 1.0)], [1], [True, False], [True]
    )
    assert validate_net(net).ok


def test_negative_duration() -> None:
    net = EngineeringSystemNet.from_entries(1, 1, [], [], [-1])
    assert "negative duration" in str(validate_net(net))


def test_shape_mismatch_stops_early() -> None:
    net = EngineeringSystemNet.from_entries(2, 2, [], [], [1, 1])
    broken = EngineeringSystemNet(
        net.m_plus, net.m_minus, np.ones(3, dtype=np.int64), net.binary_places, net.binary_transitions
    )
    report = validate_net(broken)
    assert report.issues == ("durations has shape (3,), expected (2,)",)


def test_name_count_mismatch() -> None:
    net = EngineeringSystemNet.from_entries(2, 1, [], [], [0], place_names=["only"])
    assert "1 place names for 2 places" in str(validate_net(net))
