"""Tests for omtepf.petri.stepping."""

from __future__ import annotations

import numpy as np
import pytest

from omtepf.exceptions import InfeasibleFiringError, SocBoundError, StructuralError
from omtepf.petri.nets import EngineeringSystemNet, FiringPair, Marking, OperandNet
from omtepf.petri.stepping import replay, step_esn, step_operand_net


def _move() -> EngineeringSystemNet:
    return EngineeringSystemNet.from_entries(
        2,
        1,
        plus=[(1, 0, 1.0)],
        minus=[(0, 0, 1.0)],
        durations=[1],
        binary_places=[True, True],
        binary_transitions=[True],
    )


def test_step_esn_start_and_end() -> None:
    net = _move()
    start = step_esn(net, Marking(np.array([1.0, 0.0]), np.zeros(1)), FiringPair(np.ones(1), np.zeros(1)))
    np.testing.assert_allclose(start.q_b, [0.0, 0.0])
    np.testing.assert_allclose(start.q_e, [1.0])
    assert start.time_index == 2
    end = step_esn(net, start, FiringPair(np.zeros(1), np.ones(1)))
    np.testing.assert_allclose(end.q_b, [0.0, 1.0])
    np.testing.assert_allclose(end.q_e, [0.0])


def test_step_esn_rejects_negative_binary_place() -> None:
    with pytest.raises(InfeasibleFiringError, match="places"):
        step_esn(_move(), Marking(np.zeros(2), np.zeros(1)), FiringPair(np.ones(1), np.zeros(1)))


def test_step_esn_rejects_negative_binary_transition() -> None:
    with pytest.raises(InfeasibleFiringError, match="transitions"):
        step_esn(_move(), Marking(np.zeros(2), np.zeros(1)), FiringPair(np.zeros(1), np.ones(1)))


def test_step_esn_rejects_bad_length() -> None:
    with pytest.raises(StructuralError):
        step_esn(_move(), Marking(np.zeros(3), np.zeros(1)), FiringPair.zeros(1))


def test_step_esn_rejects_bad_dt() -> None:
    with pytest.raises(ValueError, match="dt"):
        step_esn(_move(), Marking(np.ones(2), np.zeros(1)), FiringPair.zeros(1), dt=0.0)


@pytest.mark.parametrize(
    ("u_minus", "u_plus", "expected"),
    [
        ([0.0, 1.0, 0.0], [0.0, 1.0, 0.0], 10.0),
        ([0.0, 0.0, 0.0], [2.0, 0.0, 0.0], 12.0),
        ([0.0, 0.0, 3.0], [0.0, 0.0, 0.0], 7.0),
    ],
)
def test_step_operand_net(u_minus: list[float], u_plus: list[float], expected: float) -> None:
    firing = FiringPair(np.array(u_minus), np.array(u_plus))
    assert step_operand_net(OperandNet(18.0), 10.0, firing) == pytest.approx(expected)


def test_step_operand_net_rates() -> None:
    firing = FiringPair(np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.0, 0.0]))
    assert step_operand_net(OperandNet(18.0), 10.0, firing, rates=(2.0, 1.0, 0.5)) == pytest.approx(11.5)


@pytest.mark.parametrize(
    ("soc", "u_minus", "u_plus"),
    [
        (17.0, [0.0, 0.0, 0.0], [2.0, 0.0, 0.0]),
        (1.0, [0.0, 0.0, 2.0], [0.0, 0.0, 0.0]),
        (19.0, [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]),
    ],
)
def test_step_operand_net_bounds(soc: float, u_minus: list[float], u_plus: list[float]) -> None:
    with pytest.raises(SocBoundError):
        step_operand_net(OperandNet(18.0), soc, FiringPair(np.array(u_minus), np.array(u_plus)))


def test_replay() -> None:
    u_minus = np.array([[1.0], [0.0], [0.0]])
    u_plus = np.array([[0.0], [1.0], [0.0]])
    q_b, q_e = replay(_move(), Marking(np.array([1.0, 0.0]), np.zeros(1)), u_minus, u_plus)
    assert q_b.shape == (4, 2)
    assert q_e.shape == (4, 1)
    np.testing.assert_allclose(q_b[-1], [0.0, 1.0])
    np.testing.assert_allclose(q_e[:, 0], [0.0, 1.0, 0.0, 0.0])


def test_replay_rejects_mismatched_trajectories() -> None:
    with pytest.raises(StructuralError):
        replay(_move(), Marking(np.ones(2), np.zeros(1)), np.zeros((2, 1)), np.zeros((3, 1)))


@pytest.mark.parametrize("seed", range(100))
def test_replay_random_nets_conserve_incidence(seed: int) -> None:
    rng = np.random.default_rng(seed)
    places, transitions, steps = rng.integers(2, 7), rng.integers(1, 9), rng.integers(1, 6)
    plus = [(p, t, float(rng.integers(1, 3))) for p, t in rng.integers(0, [places, transitions], (6, 2))]
    minus = [(p, t, float(rng.integers(1, 3))) for p, t in rng.integers(0, [places, transitions], (6, 2))]
    net = EngineeringSystemNet.from_entries(places, transitions, plus, minus, np.ones(transitions))
    u_minus = rng.uniform(0.0, 1.0, (steps, transitions))
    u_plus = rng.uniform(0.0, 1.0, (steps, transitions))
    initial = Marking(rng.uniform(0.0, 5.0, places), np.zeros(transitions))

    q_b, q_e = replay(net, initial, u_minus, u_plus)

    np.testing.assert_allclose(
        q_b[-1],
        initial.q_b + net.m_plus @ u_plus.sum(axis=0) - net.m_minus @ u_minus.sum(axis=0),
    )
    np.testing.assert_allclose(q_e[-1], u_minus.sum(axis=0) - u_plus.sum(axis=0))
    assert q_b.shape == (steps + 1, places)
