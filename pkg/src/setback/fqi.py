"""Fitted Q-iteration over the encoded batch.

Each stored transition is reduced to ``(x̂, u, x̂′, u_ph, c)`` where x̂ is the
11-entry feature vector (day, quarter, t_in, 6-entry history code, t_out,
solar) and the stage cost c is recomputed from the stored physical draw and
the landing temperature against the schedule bounds at the landing quarter.

The horizon is 96 iterations, one per quarter of a day.  Iteration N fits a
fresh forest on targets ``c + min_u Q̂_{N−1}(x̂′, u)`` starting from Q̂₀ ≡ 0;
there is no discounting.  Greedy evaluation breaks ties toward the lowest
power level.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import extratrees
from .env import ComfortSchedule, Transition, cost as step_cost, reduced_state
from .extratrees import ExtraTreesConfig, Forest
from .rng import derive_seed

HORIZON = 96


class EmptyBatchError(ValueError):
    """No stored transitions yet: run the day with the exploration-only policy."""


@dataclass(frozen=True)
class ReducedBatch:
    """Encoded transitions as aligned arrays (one row per stored tuple)."""

    x: np.ndarray        # (N, S) reduced states
    u: np.ndarray        # (N,) requested levels
    x_next: np.ndarray   # (N, S)
    u_ph: np.ndarray     # (N,) executed electrical draw
    cost: np.ndarray     # (N,) stage cost

    def __post_init__(self):
        n = self.x.shape[0]
        if not (self.u.shape == (n,) and self.x_next.shape == self.x.shape
                and self.u_ph.shape == (n,) and self.cost.shape == (n,)):
            raise ValueError("reduced batch arrays are misaligned")

    def __len__(self) -> int:
        return self.x.shape[0]


def build_reduced_batch(transitions: Sequence[Transition], encoder,
                        schedule: ComfortSchedule) -> ReducedBatch:
    """Encode stored transitions and recompute their stage costs.

    ``encoder`` is the current auto-encoder weight set; the raw batch keeps
    full histories, so retraining the encoder only changes this derived
    view, never the stored data.
    """
    from .autoencoder import encode

    if len(transitions) == 0:
        raise EmptyBatchError("cannot reduce an empty batch")
    z = np.array([tr.x_aug.z.as_vector() for tr in transitions])
    z_next = np.array([tr.x_aug_next.z.as_vector() for tr in transitions])
    codes = encode(encoder, z)
    codes_next = encode(encoder, z_next)
    x = np.array([reduced_state(tr.x_aug, codes[i])
                  for i, tr in enumerate(transitions)])
    x_next = np.array([reduced_state(tr.x_aug_next, codes_next[i])
                       for i, tr in enumerate(transitions)])
    u = np.array([tr.u for tr in transitions])
    u_ph = np.array([tr.u_ph for tr in transitions])
    c = np.array([
        step_cost(tr.u_ph, tr.x_aug_next.obs.t_in,
                  schedule.bounds(tr.x_aug_next.obs.quarter))
        for tr in transitions
    ])
    return ReducedBatch(x=x, u=u, x_next=x_next, u_ph=u_ph, cost=c)


@dataclass(frozen=True)
class QFunction:
    """Forest approximation of the horizon-96 state-action cost."""

    forest: Forest
    actions: np.ndarray

    def action_values(self, x: np.ndarray) -> np.ndarray:
        """Predicted cost of each action in state ``x`` (reduced features)."""
        x = np.asarray(x, dtype=float)
        rows = np.empty((len(self.actions), x.shape[0] + 1))
        rows[:, :-1] = x
        rows[:, -1] = self.actions
        return extratrees.predict_batch(self.forest, rows)


def fitted_q_iteration(batch: ReducedBatch, actions: np.ndarray,
                       iterations: int = HORIZON,
                       config: ExtraTreesConfig | None = None,
                       seed: int = 0) -> QFunction:
    """Iterate Bellman-backup regressions over the reduced batch."""
    if len(batch) == 0:
        raise EmptyBatchError(
            "empty batch: use the exploration-only policy until tuples exist")
    actions = np.sort(np.asarray(actions, dtype=float))
    n = len(batch)
    n_actions = len(actions)

    xu = np.hstack([batch.x, batch.u[:, None]])
    # next-state evaluation grid: every stored successor paired with every action
    xu_next = np.repeat(batch.x_next, n_actions, axis=0)
    xu_next = np.hstack([xu_next, np.tile(actions, n)[:, None]])

    targets = batch.cost.copy()      # Q̂₀ ≡ 0, so iteration 1 regresses the costs
    forest = extratrees.fit(xu, targets, config, seed=derive_seed(seed, 1))
    for n_iter in range(2, iterations + 1):
        q_next = extratrees.predict_batch(forest, xu_next).reshape(n, n_actions)
        targets = batch.cost + q_next.min(axis=1)
        forest = extratrees.fit(xu, targets, config, seed=derive_seed(seed, n_iter))
    return QFunction(forest=forest, actions=actions)


def greedy_action(q: QFunction, x: np.ndarray) -> float:
    """Cost-minimizing action; exact ties resolve to the lowest level."""
    values = q.action_values(x)
    return float(q.actions[int(np.argmin(values))])
