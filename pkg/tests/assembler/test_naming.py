"""Tests for omtepf.assembler.naming."""

from __future__ import annotations

import pytest

from omtepf.assembler.naming import column_names, latex_name, lp_name
from omtepf.assembler.variable_index import Q_B, U_MINUS, UL_PLUS, index_variables
from tests.utils import move_net


def test_lp_name() -> None:
    assert lp_name(Q_B, 12, 3) == "Q_B_3_12"


@pytest.mark.parametrize(
    ("family", "k", "element", "expected"),
    [
        (Q_B, 12, 3, r"Q_{B,12}[3]"),
        (U_MINUS, 4, 0, r"U^{-}_{4}[0]"),
        (UL_PLUS, 2, 5, r"U^{+}_{L,2}[5]"),
        ("V_R", 7, 1, r"V_{R,7}[1]"),
        ("S", 1, 0, r"S_{1}[0]"),
    ],
)
def test_latex_name(family: str, k: int, element: int, expected: str) -> None:
    assert latex_name(family, k, element) == expected


def test_column_names() -> None:
    index = index_variables(move_net(), (), 2)
    names = column_names(index)
    assert len(names) == index.total
    assert names[:3] == ("Q_B_0_1", "Q_B_1_1", "Q_B_0_2")
    assert names[-1] == "U_plus_0_2"
    assert len(set(names)) == len(names)
