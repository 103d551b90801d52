"""Structural checks of engineering system nets."""

from __future__ import annotations

import dataclasses
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from omtepf.petri.nets import EngineeringSystemNet


@dataclasses.dataclass(frozen=True)
class ValidationReport:
    """Issues found in a net. An empty list means the net is well formed."""

    issues: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.issues

    def __str__(self) -> str:
        if self.ok:
            return "net is valid"
        return "\n".join(f"- {issue}" for issue in self.issues)


def validate_net(net: EngineeringSystemNet) -> ValidationReport:
    """Checks dimensions, signs and weight kinds of a net.

    The {0, 1} weight check covers arcs between binary places and binary
    transitions only; electric rows of charging columns carry current draws.

    Args:
        net: The net to check.

    Returns:
        The report. Never raises.
    """
    issues: list[str] = []

    if net.m_plus.shape != net.m_minus.shape:
        issues.append(f"m_plus shape {net.m_plus.shape} differs from m_minus {net.m_minus.shape}")
        return ValidationReport(tuple(issues))

    places, transitions = net.m_plus.shape
    for name, size, expected in [
        ("durations", net.durations.shape, (transitions,)),
        ("binary_places", net.binary_places.shape, (places,)),
        ("binary_transitions", net.binary_transitions.shape, (transitions,)),
    ]:
        if size != expected:
            issues.append(f"{name} has shape {size}, expected {expected}")
    if net.place_names and len(net.place_names) != places:
        issues.append(f"{len(net.place_names)} place names for {places} places")
    if net.transition_names and len(net.transition_names) != transitions:
        issues.append(f"{len(net.transition_names)} transition names for {transitions} transitions")
    if issues:
        return ValidationReport(tuple(issues))

    for name, matrix in [("m_plus", net.m_plus), ("m_minus", net.m_minus)]:
        coo = matrix.tocoo()
        if not np.all(np.isfinite(coo.data)):
            issues.append(f"{name} has non-finite weights")
        for row, col, value in zip(coo.row, coo.col, coo.data):
            if value < 0:
                issues.append(f"{name}[{row}, {col}] = {value} is negative")
            elif (
                net.binary_places[row]
                and net.binary_transitions[col]
                and value not in (0.0, 1.0)
            ):
                issues.append(f"{name}[{row}, {col}] = {value} is not a binary weight")

    for transition in np.flatnonzero(net.durations < 0):
        issues.append(f"transition {transition} has negative duration {net.durations[transition]}")

    return ValidationReport(tuple(issues))
