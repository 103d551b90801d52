"""State transition functions of engineering system nets and operand nets."""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np

from omtepf.exceptions import InfeasibleFiringError, SocBoundError, StructuralError
from omtepf.petri.nets import BINARY_TOL, FiringPair, Marking

if TYPE_CHECKING:
    from collections.abc import Sequence

    from omtepf.petri.nets import EngineeringSystemNet, OperandNet


def step_esn(
    net: EngineeringSystemNet, marking: Marking, firing: FiringPair, dt: float = 1.0
) -> Marking:
    """Advances an engineering system net by one time step.

    Q_B[k+1] = Q_B[k] + M⁺U⁺ΔT − M⁻U⁻ΔT and Q_E[k+1] = Q_E[k] − U⁺ΔT + U⁻ΔT.

    Args:
        net: The net.
        marking: Marking at time index k.
        firing: Firings at time index k.
        dt: Step length.

    Raises:
        ValueError: dt is not positive.
        StructuralError: Vector lengths do not match the net.
        InfeasibleFiringError: A binary-kind marking becomes negative.

    Returns:
        The marking at k+1.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    _check_length("q_b", marking.q_b, net.place_count)
    _check_length("q_e", marking.q_e, net.transition_count)
    _check_length("u_minus", firing.u_minus, net.transition_count)
    _check_length("u_plus", firing.u_plus, net.transition_count)

    q_b = marking.q_b + (net.m_plus @ firing.u_plus) * dt - (net.m_minus @ firing.u_minus) * dt
    q_e = marking.q_e - firing.u_plus * dt + firing.u_minus * dt

    bad_places = np.flatnonzero(net.binary_places & (q_b < -BINARY_TOL))
    if bad_places.size:
        raise InfeasibleFiringError(
            f"Negative binary place marking at k={marking.time_index + 1}: "
            f"places {bad_places.tolist()}"
        )
    bad_transitions = np.flatnonzero(net.binary_transitions & (q_e < -BINARY_TOL))
    if bad_transitions.size:
        raise InfeasibleFiringError(
            f"Negative binary transition marking at k={marking.time_index + 1}: "
            f"transitions {bad_transitions.tolist()}"
        )
    return Marking(q_b=q_b, q_e=q_e, time_index=marking.time_index + 1)


def step_operand_net(
    net: OperandNet,
    soc: float,
    firing: FiringPair,
    rates: Sequence[float] = (1.0, 1.0, 1.0),
    dt: float = 1.0,
    *,
    tol: float = BINARY_TOL,
) -> float:
    """Advances the state of charge of one operand net.

    Args:
        net: The operand net.
        soc: State of charge before the step.
        firing: Firings of (charge, hold, discharge).
        rates: Charge units moved per firing of each transition.
        dt: Step length.
        tol: Slack allowed on the [0, capacity] range.

    Raises:
        SocBoundError: The state of charge leaves [0, capacity].

    Returns:
        The state of charge after the step.
    """
    if not -tol <= soc <= net.capacity + tol:
        raise SocBoundError(f"State of charge {soc} outside [0, {net.capacity}]")
    _check_length("u_minus", firing.u_minus, net.transition_count)
    _check_length("u_plus", firing.u_plus, net.transition_count)
    rates = np.asarray(rates, dtype=float)
    gained = float(net.m_plus[0] @ (rates * firing.u_plus))
    spent = float(net.m_minus[0] @ (rates * firing.u_minus))
    result = soc + (gained - spent) * dt
    if not -tol <= result <= net.capacity + tol:
        raise SocBoundError(f"State of charge {result} outside [0, {net.capacity}]")
    return result


def replay(
    net: EngineeringSystemNet,
    initial: Marking,
    u_minus: np.ndarray,
    u_plus: np.ndarray,
    dt: float = 1.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Steps a recorded firing trajectory through the net.

    Args:
        net: The net.
        initial: Marking at the first time index.
        u_minus: Input firings, shape (K, transition_count).
        u_plus: Output firings, shape (K, transition_count).
        dt: Step length.

    Returns:
        Place and transition marking trajectories, shapes (K+1, place_count) and
        (K+1, transition_count).
    """
    if u_minus.shape != u_plus.shape:
        raise StructuralError(f"Firing trajectories differ: {u_minus.shape} vs {u_plus.shape}")
    steps = u_minus.shape[0]
    q_b = np.empty((steps + 1, net.place_count))
    q_e = np.empty((steps + 1, net.transition_count))
    marking = initial
    q_b[0], q_e[0] = marking.q_b, marking.q_e
    for k in range(steps):
        marking = step_esn(net, marking, FiringPair(u_minus[k], u_plus[k]), dt)
        q_b[k + 1], q_e[k + 1] = marking.q_b, marking.q_e
    return q_b, q_e


def _check_length(name: str, vector: np.ndarray, expected: int) -> None:
    if np.shape(vector) != (expected,):
        raise StructuralError(f"{name} has shape {np.shape(vector)}, expected ({expected},)")
