"""Firing schedules of a whole day and the trajectories they produce."""

from __future__ import annotations

import dataclasses
from typing import TYPE_CHECKING

import numpy as np

from omtepf.petri.nets import FiringPair, Marking
from omtepf.petri.stepping import replay, step_operand_net
from omtepf.ten.programs import StageState

if TYPE_CHECKING:
    from omtepf.ten.builder import TENModel
    from omtepf.ten.programs import StageProgram

ON = 0.5


@dataclasses.dataclass(frozen=True, eq=False)
class Schedule:
    """Global firing starts and ends, shape (K, transition count) each.

    The arrays are owned by the schedule and edited in place by the stages of a
    scenario; `copy` before sharing.
    """

    u_minus: np.ndarray
    u_plus: np.ndarray

    @classmethod
    def initial(cls, model: TENModel) -> Schedule:
        """An empty schedule in which the transitions in progress at k = 1 complete."""
        shape = (model.steps, model.net.transition_count)
        schedule = cls(np.zeros(shape), np.zeros(shape))
        durations = model.net.durations
        for t in np.flatnonzero(model.boundary.initial_q_e).tolist():
            d = int(durations[t])
            if 1 <= d <= model.steps:
                schedule.u_plus[d - 1, t] = model.boundary.initial_q_e[t]
        return schedule

    def copy(self) -> Schedule:
        return Schedule(self.u_minus.copy(), self.u_plus.copy())

    def closed(self, durations: np.ndarray) -> Schedule:
        """A copy without the timed starts that would complete after step K."""
        steps = self.u_minus.shape[0]
        durations = np.asarray(durations)
        late = (np.arange(1, steps + 1)[:, None] + durations > steps) & (durations > 0)
        return Schedule(np.where(late, 0.0, self.u_minus), self.u_plus.copy())

    def fire(self, transition: int, k: int, duration: int, value: float = 1.0) -> None:
        """Starts a transition at step k; it ends at k + duration if inside the horizon."""
        self.u_minus[k - 1, transition] = value
        if k + duration <= self.u_plus.shape[0]:
            self.u_plus[k + duration - 1, transition] = value

    def cancel(self, transition: int, k: int, duration: int) -> None:
        self.fire(transition, k, duration, 0.0)

    def started(self, k: int, transitions: np.ndarray) -> np.ndarray:
        """The given transitions that start at step k."""
        return transitions[self.u_minus[k - 1, transitions] > ON]

    def embed(self, model: TENModel, stage: StageProgram, u_minus: np.ndarray) -> None:
        """Copies the rounded firing starts of a binary stage into the schedule.

        Args:
            model: The model.
            stage: The stage the values come from.
            u_minus: Local firing starts, shape (stage horizon, kept transitions).
        """
        restriction = stage.restriction
        durations = model.net.durations
        for step, column in np.argwhere(u_minus > ON).tolist():
            t = int(restriction.transitions[column])
            self.fire(t, restriction.first + step, int(durations[t]))

    def embed_continuous(
        self, stage: StageProgram, u_minus: np.ndarray, transitions: np.ndarray
    ) -> None:
        """Copies instantaneous firings of a continuous stage, ends equal to starts.

        Only the given global transitions are copied; they must be kept by the stage.
        """
        restriction = stage.restriction
        local = np.searchsorted(restriction.transitions, transitions)
        rows = slice(restriction.first - 1, restriction.first - 1 + u_minus.shape[0])
        self.u_minus[rows, transitions] = u_minus[:, local]
        self.u_plus[rows, transitions] = u_minus[:, local]


def soc_trajectory(
    model: TENModel, u_minus: np.ndarray, first: int = 1, soc: np.ndarray | None = None
) -> np.ndarray:
    """Steps every vehicle's operand net through the schedule.

    Args:
        model: The model.
        u_minus: Global firing starts, shape (K, transition count).
        first: First marking to step from.
        soc: Charges at `first`; defaults to the initial charges.

    Raises:
        SocBoundError: A charge leaves [0, capacity].

    Returns:
        Charges at markings first..K+1, shape (K + 2 - first, vehicle count).
    """
    soc = model.boundary.initial_soc if soc is None else np.asarray(soc, dtype=float)
    steps = model.steps
    out = np.empty((steps + 2 - first, model.ev_count))
    out[0] = soc
    operand = model.sync.lambda_minus @ u_minus[first - 1 :].T
    for ev, net in enumerate(model.operand_nets):
        value = float(soc[ev])
        rows = operand[3 * ev : 3 * ev + 3]
        for i in range(steps + 1 - first):
            firing = FiringPair(rows[:, i], rows[:, i])
            value = step_operand_net(net, value, firing, dt=model.dt)
            out[i + 1, ev] = value
    return out


@dataclasses.dataclass(frozen=True, eq=False)
class Trajectory:
    """Markings 1..K+1 produced by a schedule."""

    q_b: np.ndarray
    q_e: np.ndarray
    soc: np.ndarray

    def state(self, k: int) -> StageState:
        return StageState(self.q_b[k - 1], self.q_e[k - 1], self.soc[k - 1])


def replay_schedule(model: TENModel, schedule: Schedule, upto: int | None = None) -> Trajectory:
    """Replays a schedule from the initial state.

    Args:
        model: The model.
        schedule: The schedule.
        upto: Last marking to produce; defaults to K+1.

    Raises:
        InfeasibleFiringError: A vehicle leaves a place it is not in.
        SocBoundError: A charge leaves [0, capacity].
    """
    steps = model.steps if upto is None else upto - 1
    boundary = model.boundary
    q_b, q_e = replay(
        model.net,
        Marking(boundary.initial_q_b, boundary.initial_q_e),
        schedule.u_minus[:steps],
        schedule.u_plus[:steps],
        model.dt,
    )
    soc = soc_trajectory(model, schedule.u_minus)[: steps + 1]
    return Trajectory(q_b, q_e, soc)
