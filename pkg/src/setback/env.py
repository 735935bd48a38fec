"""Closed-loop MDP assembly: state, actions, comfort schedule, cost, stepping.

One decision step covers a quarter-hour.  The controller observes
``(day, quarter, t_in, t_out, solar)`` plus a sliding window of the last 10
indoor temperatures and the last 10 executed electrical draws; the envelope
temperature is never observable, the history window is what restores the
missing state information.  Internal gains drive the simulator but are not
observed.

Cost per step is electrical energy (Wh) plus a flat comfort penalty of 1e5
whenever the landing indoor temperature leaves the active schedule bounds;
the penalty is always evaluated against the schedule at the quarter being
landed on.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .building import BuildingParams, BuildingState, step as building_step
from .thermostat import Latch, PhysicalAction, ThermostatParams, apply as thermostat_apply
from .weather import QUARTERS_PER_DAY, ExogenousTrace

HISTORY_LEN = 10
N_ACTIONS = 10
COMFORT_PENALTY = 1e5
DT_HOURS = 0.25

SETBACK_START_QUARTER = 29   # 7h00 starts quarter 29
SETBACK_END_QUARTER = 68     # last relaxed quarter ends at 17h00


@dataclass(frozen=True)
class ObservableState:
    day: int        # 1..7
    quarter: int    # 1..96
    t_in: float
    t_out: float
    solar: float

    def __post_init__(self):
        if not 1 <= self.day <= 7:
            raise ValueError(f"day must be in 1..7, got {self.day}")
        if not 1 <= self.quarter <= QUARTERS_PER_DAY:
            raise ValueError(f"quarter must be in 1..96, got {self.quarter}")


@dataclass(frozen=True)
class HistoryVector:
    """Last ``HISTORY_LEN`` indoor temperatures and electrical draws.

    Index 0 is the most recent step; pre-history is padded with the initial
    temperature and zero power.
    """

    past_t_in: np.ndarray
    past_u_ph: np.ndarray

    def __post_init__(self):
        if len(self.past_t_in) != HISTORY_LEN or len(self.past_u_ph) != HISTORY_LEN:
            raise ValueError(f"history window must hold {HISTORY_LEN} entries per series")

    @classmethod
    def initial(cls, t_in0: float) -> "HistoryVector":
        return cls(np.full(HISTORY_LEN, float(t_in0)), np.zeros(HISTORY_LEN))

    def shifted(self, t_in: float, u_ph: float) -> "HistoryVector":
        return HistoryVector(
            np.concatenate(([t_in], self.past_t_in[:-1])),
            np.concatenate(([u_ph], self.past_u_ph[:-1])),
        )

    def as_vector(self) -> np.ndarray:
        return np.concatenate((self.past_t_in, self.past_u_ph))


@dataclass(frozen=True)
class AugmentedState:
    obs: ObservableState
    z: HistoryVector


@dataclass(frozen=True)
class Transition:
    """One stored batch tuple: (x_aug, u, x_aug', u_ph_total)."""

    x_aug: AugmentedState
    u: float
    x_aug_next: AugmentedState
    u_ph: float


class ComfortSchedule:
    """Per-quarter (t_low, t_high) comfort bounds."""

    def __init__(self, t_low: np.ndarray, t_high: np.ndarray):
        t_low = np.asarray(t_low, dtype=float)
        t_high = np.asarray(t_high, dtype=float)
        if t_low.shape != (QUARTERS_PER_DAY,) or t_high.shape != (QUARTERS_PER_DAY,):
            raise ValueError(f"schedule needs {QUARTERS_PER_DAY} quarters per series")
        if not np.all(t_low < t_high):
            raise ValueError("schedule requires t_low < t_high in every quarter")
        self.t_low = t_low
        self.t_high = t_high

    @classmethod
    def constant(cls, t_low: float = 20.0, t_high: float = 22.5) -> "ComfortSchedule":
        return cls(np.full(QUARTERS_PER_DAY, t_low), np.full(QUARTERS_PER_DAY, t_high))

    @classmethod
    def setback(cls, t_low: float = 20.0, t_high: float = 22.5,
                relaxed_low: float = 15.0, relaxed_high: float | None = None,
                start_quarter: int = SETBACK_START_QUARTER,
                end_quarter: int = SETBACK_END_QUARTER) -> "ComfortSchedule":
        """Relax the bounds during the away window (quarters 29–68 = 7h–17h).

        Heating seasons relax the lower bound; pass ``relaxed_high`` to also
        relax the upper bound for cooling seasons.
        """
        lo = np.full(QUARTERS_PER_DAY, t_low)
        hi = np.full(QUARTERS_PER_DAY, t_high)
        sl = slice(start_quarter - 1, end_quarter)
        lo[sl] = relaxed_low
        if relaxed_high is not None:
            hi[sl] = relaxed_high
        return cls(lo, hi)

    def bounds(self, quarter: int) -> tuple[float, float]:
        return float(self.t_low[quarter - 1]), float(self.t_high[quarter - 1])


def action_set(season: str, params: ThermostatParams) -> np.ndarray:
    """Ten evenly spaced request levels {0, P/9, …, P}, ascending."""
    p = params.p_h if season == "winter" else params.p_c
    return np.linspace(0.0, p, N_ACTIONS)


def cost(u_ph: float, t_in_next: float, bounds: tuple[float, float],
         dt: float = DT_HOURS) -> float:
    """Electrical energy (Wh) plus the comfort penalty on the landing state."""
    lo, hi = bounds
    penalty = COMFORT_PENALTY if (t_in_next < lo or t_in_next > hi) else 0.0
    return u_ph * dt + penalty


def thermal_power(action: PhysicalAction, cop_heat: float, cop_cool: float) -> float:
    """HVAC thermal output (W) delivered to the air node.

    Heat-pump draw is scaled by its COP; the auxiliary element is resistive
    (one thermal watt per electrical watt); cooling extracts heat.
    """
    if action.cooling:
        return -cop_cool * action.u_ph_hp
    return cop_heat * action.u_ph_hp + action.u_ph_aux


@dataclass(frozen=True)
class Plant:
    """Static closed-loop configuration shared by every step of a lane."""

    building: BuildingParams
    thermostat: ThermostatParams
    schedule: ComfortSchedule
    season: str
    cop_heat: float = 3.0
    cop_cool: float = 3.0


@dataclass(frozen=True)
class EnvState:
    """Everything carried between steps: true state, latch, observables."""

    sim: BuildingState
    latch: Latch
    aug: AugmentedState


@dataclass(frozen=True)
class StepRecord:
    """Per-step diagnostics for traces and metrics."""

    day: int          # global day index, 1-based
    quarter: int
    t_in: float
    t_m: float
    t_out: float
    solar: float
    q_gains: float
    u_req: float
    u_ph_hp: float
    u_ph_aux: float
    u_ph: float
    cooling: bool
    cost: float
    violation: bool


def initial_env_state(t_in0: float, t_m0: float, trace: ExogenousTrace,
                      index: int = 0, day: int = 1, quarter: int = 1) -> EnvState:
    obs = ObservableState(day=day, quarter=quarter, t_in=t_in0,
                          t_out=float(trace.t_out[index]),
                          solar=float(trace.solar[index]))
    return EnvState(sim=BuildingState(t_in0, t_m0), latch=Latch.FREE,
                    aug=AugmentedState(obs=obs, z=HistoryVector.initial(t_in0)))


def _advance_clock(day: int, quarter: int) -> tuple[int, int]:
    if quarter == QUARTERS_PER_DAY:
        return (day % 7) + 1, 1
    return day, quarter + 1


def env_step(plant: Plant, state: EnvState, u: float,
             exo_now: tuple[float, float, float],
             exo_next: tuple[float, float],
             global_day: int = 1) -> tuple[Transition, EnvState, StepRecord]:
    """Run one closed-loop step.

    ``exo_now`` is (t_out, solar, q_gains) driving the simulator this
    quarter; ``exo_next`` is (t_out, solar) observed at the landing quarter.
    The thermostat sees the schedule-adjusted set points for the current
    quarter; the cost penalty uses the bounds at the landing quarter.
    """
    obs = state.aug.obs
    t_out, solar, q_gains = exo_now

    lo, hi = plant.schedule.bounds(obs.quarter)
    action, latch_next = thermostat_apply(
        obs.t_in, u, plant.thermostat.with_bounds(lo, hi), state.latch, plant.season)

    q_h = thermal_power(action, plant.cop_heat, plant.cop_cool)
    sim_next = building_step(state.sim, plant.building, t_out, q_gains, solar, q_h)

    day_next, quarter_next = _advance_clock(obs.day, obs.quarter)
    lo_next, hi_next = plant.schedule.bounds(quarter_next)
    u_ph = action.total
    c = cost(u_ph, sim_next.t_in, (lo_next, hi_next))

    obs_next = ObservableState(day=day_next, quarter=quarter_next,
                               t_in=sim_next.t_in,
                               t_out=exo_next[0], solar=exo_next[1])
    aug_next = AugmentedState(obs=obs_next, z=state.aug.z.shifted(obs.t_in, u_ph))
    transition = Transition(x_aug=state.aug, u=float(u), x_aug_next=aug_next, u_ph=u_ph)
    record = StepRecord(
        day=global_day, quarter=obs.quarter, t_in=obs.t_in, t_m=state.sim.t_m,
        t_out=t_out, solar=solar, q_gains=q_gains, u_req=float(u),
        u_ph_hp=action.u_ph_hp, u_ph_aux=action.u_ph_aux, u_ph=u_ph,
        cooling=action.cooling, cost=c,
        violation=(sim_next.t_in < lo_next or sim_next.t_in > hi_next),
    )
    return transition, EnvState(sim=sim_next, latch=latch_next, aug=aug_next), record


Policy = Callable[[AugmentedState], float]


def run_day(plant: Plant, state: EnvState, policy: Policy, trace: ExogenousTrace,
            start_index: int, global_day: int = 1,
            ) -> tuple[list[Transition], list[StepRecord], EnvState]:
    """Roll 96 steps from ``start_index`` into the trace.

    The landing observation of step k reads the trace at k+1; only the very
    last step of a trace clamps to its final entry (that observation feeds
    the stored transition, never the simulator).
    """
    if start_index + QUARTERS_PER_DAY > trace.n_steps:
        raise ValueError("trace does not cover the requested day")
    transitions: list[Transition] = []
    records: list[StepRecord] = []
    for k in range(start_index, start_index + QUARTERS_PER_DAY):
        u = policy(state.aug)
        k_next = min(k + 1, trace.n_steps - 1)
        tr, state, rec = env_step(
            plant, state, u,
            (float(trace.t_out[k]), float(trace.solar[k]), float(trace.q_gains[k])),
            (float(trace.t_out[k_next]), float(trace.solar[k_next])),
            global_day=global_day,
        )
        transitions.append(tr)
        records.append(rec)
    return transitions, records, state


# ---------------------------------------------------------------------------
# Batch persistence (schema documented in docs/batch_schema.md)
# ---------------------------------------------------------------------------

def _aug_fields(aug: AugmentedState) -> list:
    return ([aug.obs.day, aug.obs.quarter, aug.obs.t_in]
            + list(aug.z.past_t_in) + list(aug.z.past_u_ph)
            + [aug.obs.t_out, aug.obs.solar])


def _aug_header(prefix: str) -> list[str]:
    return ([f"{prefix}day", f"{prefix}quarter", f"{prefix}t_in"]
            + [f"{prefix}z_t_in_{i}" for i in range(1, HISTORY_LEN + 1)]
            + [f"{prefix}z_u_ph_{i}" for i in range(1, HISTORY_LEN + 1)]
            + [f"{prefix}t_out", f"{prefix}solar"])


BATCH_HEADER = _aug_header("") + ["u"] + _aug_header("next_") + ["u_ph"]


def save_batch(transitions: Sequence[Transition], path: str | Path) -> None:
    """Write one transition per line, fields ordered per the shipped schema."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(BATCH_HEADER)
        for tr in transitions:
            row = (_aug_fields(tr.x_aug) + [tr.u]
                   + _aug_fields(tr.x_aug_next) + [tr.u_ph])
            writer.writerow([v if isinstance(v, int) else repr(float(v)) for v in row])


def _aug_from_fields(vals: list[float]) -> AugmentedState:
    obs = ObservableState(day=int(vals[0]), quarter=int(vals[1]), t_in=vals[2],
                          t_out=vals[3 + 2 * HISTORY_LEN], solar=vals[4 + 2 * HISTORY_LEN])
    z = HistoryVector(np.array(vals[3:3 + HISTORY_LEN]),
                      np.array(vals[3 + HISTORY_LEN:3 + 2 * HISTORY_LEN]))
    return AugmentedState(obs=obs, z=z)


def load_batch(path: str | Path) -> list[Transition]:
    width = len(BATCH_HEADER)
    aug_w = (width - 2) // 2
    out: list[Transition] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != BATCH_HEADER:
            raise ValueError(f"{path}: unexpected batch header")
        for row in reader:
            vals = [float(v) for v in row]
            out.append(Transition(
                x_aug=_aug_from_fields(vals[:aug_w]),
                u=vals[aug_w],
                x_aug_next=_aug_from_fields(vals[aug_w + 1:aug_w + 1 + aug_w]),
                u_ph=vals[-1],
            ))
    return out


# ---------------------------------------------------------------------------
# Feature layout used by the regression stages
# ---------------------------------------------------------------------------

def reduced_state(aug: AugmentedState, z_e: np.ndarray) -> np.ndarray:
    """Feature vector (day, quarter, t_in, z_e…, t_out, solar)."""
    return np.concatenate((
        [float(aug.obs.day), float(aug.obs.quarter), aug.obs.t_in],
        np.asarray(z_e, dtype=float),
        [aug.obs.t_out, aug.obs.solar],
    ))


def history_matrix(transitions: Sequence[Transition]) -> np.ndarray:
    """Stacked raw history vectors (one row per stored transition)."""
    return np.array([tr.x_aug.z.as_vector() for tr in transitions])
