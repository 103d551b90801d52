"""Tests for omtepf.ten.taxonomy."""

from __future__ import annotations

import pytest

from omtepf.exceptions import DomainError
from omtepf.ten.taxonomy import (
    CHARGING_FAMILIES,
    ELECTRIC_FAMILIES,
    TRANSPORT_FAMILIES,
    VEHICLE_FAMILIES,
    Capability,
    Family,
    OperandKind,
    Part,
    TENOperand,
    charging_draw,
)


def test_families_partition() -> None:
    assert ELECTRIC_FAMILIES | VEHICLE_FAMILIES == set(Family)
    assert not ELECTRIC_FAMILIES & VEHICLE_FAMILIES
    assert not TRANSPORT_FAMILIES & CHARGING_FAMILIES


@pytest.mark.parametrize(
    ("family", "draw"),
    [
        (Family.CW_HOME, complex(0.9, 0.44)),
        (Family.CW_WORK, complex(1.8, 0.88)),
        (Family.CR, complex(3.6, 1.76)),
    ],
)
def test_charging_draw(family: Family, draw: complex) -> None:
    assert charging_draw(family) == draw


@pytest.mark.parametrize("family", [Family.TP, Family.TT, Family.EGC, Family.ET])
def test_charging_draw_domain(family: Family) -> None:
    with pytest.raises(DomainError, match="not a charging family"):
        charging_draw(family)


def test_operand_ev_id() -> None:
    assert TENOperand(OperandKind.EV, 3).ev_id == 3
    with pytest.raises(ValueError, match="ev_id"):
        TENOperand(OperandKind.EV)
    with pytest.raises(ValueError, match="ev_id"):
        TENOperand(OperandKind.CURRENT_REAL, 0)


@pytest.mark.parametrize(
    ("capability", "name"),
    [
        (Capability(0, Family.TP, ev=2, buffer=17), "E_TP[ev2@17]"),
        (Capability(1, Family.TT, ev=0, origin=17, destination=19), "E_TT[ev0:17->19]"),
        (Capability(2, Family.EGC, part=Part.REAL, buffer=4), "E_EGC[R:4]"),
        (Capability(3, Family.ET, part=Part.IMAG, origin=1, destination=3), "E_ET[I:1->3]"),
    ],
)
def test_capability_name(capability: Capability, name: str) -> None:
    assert capability.name == name
