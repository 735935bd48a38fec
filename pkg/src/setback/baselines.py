"""Baseline controllers: the constant-set-point default and the prescient
day-ahead optimum.

The default controller chases a fixed 20.5 °C target: full heating draw
below it in winter (full cooling draw above it in summer), zero otherwise;
the thermostat override still applies on top.

The prescient controller knows the plant and the whole day of disturbances.
Each day is solved by backward dynamic programming over a discretized
(t_in, t_m, latch) state with the real thermostat applied inside the
transition and the same energy-plus-comfort-penalty stage cost the learning
agent pays, evaluated against the landing quarter's schedule bounds (the
final stage lands on the next day's first quarter).  The one-step thermal
map is affine, so each stage sweeps the whole grid with a handful of array
operations; values between grid nodes are bilinearly interpolated (clamped
at the grid edge).  The greedy forward rollout re-simulates with the exact
integrator and fails loudly if the realized trajectory ever leaves the
grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .building import BuildingState, step as building_step, step_affine_map
from .env import COMFORT_PENALTY, DT_HOURS, Plant, thermal_power
from .thermostat import Latch, apply as thermostat_apply, apply_array
from .weather import QUARTERS_PER_DAY

DEFAULT_TARGET = 20.5


class GridCoverageError(RuntimeError):
    """The rollout left the discretized state grid."""


def default_policy(t_in: float, season: str, params, target: float = DEFAULT_TARGET) -> float:
    """Requested level of the constant-set-point strategy."""
    if season == "winter":
        return params.p_h if t_in < target else 0.0
    return params.p_c if t_in > target else 0.0


@dataclass(frozen=True)
class GridSpec:
    """Discretization axes for the prescient sweep (strictly increasing)."""

    t_in_axis: np.ndarray
    t_m_axis: np.ndarray

    def __post_init__(self):
        for name, axis in (("t_in_axis", self.t_in_axis), ("t_m_axis", self.t_m_axis)):
            if len(axis) < 2 or not (np.diff(axis) > 0).all():
                raise ValueError(f"{name} must be strictly increasing with >= 2 points")

    @classmethod
    def from_ranges(cls, t_in: tuple[float, float, float] = (14.0, 26.0, 0.1),
                    t_m: tuple[float, float, float] = (10.0, 30.0, 0.2)) -> "GridSpec":
        axes = []
        for lo, hi, step_size in (t_in, t_m):
            if step_size <= 0.0 or hi <= lo:
                raise ValueError("grid ranges need hi > lo and step > 0")
            n = int(round((hi - lo) / step_size))
            axes.append(lo + step_size * np.arange(n + 1))
        return cls(t_in_axis=axes[0], t_m_axis=axes[1])

    def halved(self) -> "GridSpec":
        def refine(axis):
            mid = 0.5 * (axis[:-1] + axis[1:])
            out = np.empty(len(axis) + len(mid))
            out[0::2] = axis
            out[1::2] = mid
            return out
        return GridSpec(refine(self.t_in_axis), refine(self.t_m_axis))


@dataclass(frozen=True)
class PrescientDayResult:
    actions: np.ndarray      # requested level per quarter
    u_ph: np.ndarray         # executed electrical draw per quarter
    t_in: np.ndarray         # indoor temperature at each decision instant
    t_m: np.ndarray
    cost: float              # DP objective realized by the rollout
    energy_wh: float
    final_state: BuildingState
    final_latch: Latch


def _interp_weights(axis: np.ndarray, x: np.ndarray):
    """Bilinear cell indices and weights, clamped to the axis range."""
    i = np.searchsorted(axis, x, side="right") - 1
    i = np.clip(i, 0, len(axis) - 2)
    w = (x - axis[i]) / (axis[i + 1] - axis[i])
    return i, np.clip(w, 0.0, 1.0)


def _interp_values(v_next: np.ndarray, latch_next: np.ndarray,
                   grid: GridSpec, t_in: np.ndarray, t_m: np.ndarray) -> np.ndarray:
    ii, wi = _interp_weights(grid.t_in_axis, t_in)
    jj, wj = _interp_weights(grid.t_m_axis, t_m)
    lat = np.broadcast_to(latch_next, t_in.shape)
    v00 = v_next[lat, ii, jj]
    v10 = v_next[lat, ii + 1, jj]
    v01 = v_next[lat, ii, jj + 1]
    v11 = v_next[lat, ii + 1, jj + 1]
    return ((1 - wi) * (1 - wj) * v00 + wi * (1 - wj) * v10
            + (1 - wi) * wj * v01 + wi * wj * v11)


def _stage_bounds(plant: Plant, quarter: int) -> tuple[float, float]:
    nxt = quarter + 1 if quarter < QUARTERS_PER_DAY else 1
    return plant.schedule.bounds(nxt)


def _check_band_coverage(plant: Plant, grid: GridSpec) -> None:
    # the comfort band must sit inside the grid; excursions beyond it are
    # caught by the rollout coverage check instead
    lo_needed = float(plant.schedule.t_low.min())
    hi_needed = float(plant.schedule.t_high.max())
    if grid.t_in_axis[0] > lo_needed or grid.t_in_axis[-1] < hi_needed:
        raise ValueError(
            f"t_in grid [{grid.t_in_axis[0]}, {grid.t_in_axis[-1]}] does not "
            f"cover the comfort band [{lo_needed}, {hi_needed}]")


def backward_sweep(plant: Plant, t_out: np.ndarray, solar: np.ndarray,
                   q_gains: np.ndarray, actions: np.ndarray, grid: GridSpec,
                   horizon: int = QUARTERS_PER_DAY) -> np.ndarray:
    """Stage value tables of shape (horizon+1, latch, t_in, t_m).

    values[k] is the optimal cost-to-go before quarter k+1; the terminal
    table is zero.  Stages sweep the whole grid with the affine one-step
    map, one array pass per (latch, action).
    """
    actions = np.sort(np.asarray(actions, dtype=float))
    M, N = step_affine_map(plant.building)
    t_in_ax = grid.t_in_axis
    t_m_ax = grid.t_m_axis
    ni, nj = len(t_in_ax), len(t_m_ax)
    n_act = len(actions)

    values = np.zeros((horizon + 1, 3, ni, nj))
    b_in = M[0, 1] * t_m_ax           # t_m contribution to next t_in
    b_m = M[1, 1] * t_m_ax

    for k in range(horizon - 1, -1, -1):
        quarter = k + 1
        lo, hi = plant.schedule.bounds(quarter)
        adj = plant.thermostat.with_bounds(lo, hi)
        lo_next, hi_next = _stage_bounds(plant, quarter)
        exo_in = N[0, 0] * t_out[k] + N[0, 1] * q_gains[k] + N[0, 2] * solar[k]
        exo_m = N[1, 0] * t_out[k] + N[1, 1] * q_gains[k] + N[1, 2] * solar[k]
        v_next = values[k + 1]
        for latch in Latch:
            u_hp = np.empty((n_act, ni))
            u_aux = np.empty((n_act, ni))
            cooling = np.empty((n_act, ni), dtype=bool)
            latch_next = np.empty((n_act, ni), dtype=np.int64)
            for a, level in enumerate(actions):
                u_hp[a], u_aux[a], cooling[a], latch_next[a] = apply_array(
                    t_in_ax, level, adj, latch, plant.season)
            q_h = np.where(cooling, -plant.cop_cool * u_hp,
                           plant.cop_heat * u_hp + u_aux)
            u_ph = u_hp + u_aux
            a_in = M[0, 0] * t_in_ax + exo_in + N[0, 3] * q_h    # (n_act, ni)
            a_m = M[1, 0] * t_in_ax + exo_m + N[1, 3] * q_h
            t_in_next = a_in[:, :, None] + b_in[None, None, :]   # (n_act, ni, nj)
            t_m_next = a_m[:, :, None] + b_m[None, None, :]
            penalty = COMFORT_PENALTY * ((t_in_next < lo_next) | (t_in_next > hi_next))
            stage = u_ph[:, :, None] * DT_HOURS + penalty
            cont = _interp_values(v_next, latch_next[:, :, None], grid,
                                  t_in_next, t_m_next)
            values[k, latch] = (stage + cont).min(axis=0)
    return values


def prescient_solve(plant: Plant, t_out: np.ndarray, solar: np.ndarray,
                    q_gains: np.ndarray, initial_state: BuildingState,
                    initial_latch: Latch, actions: np.ndarray,
                    grid: GridSpec, horizon: int = QUARTERS_PER_DAY) -> PrescientDayResult:
    """Solve one day (96 stages by default) and roll the greedy policy forward."""
    if not (len(t_out) == len(solar) == len(q_gains) == horizon):
        raise ValueError(f"prescient_solve needs exactly {horizon} steps of exogenous data")
    _check_band_coverage(plant, grid)
    actions = np.sort(np.asarray(actions, dtype=float))
    t_in_ax = grid.t_in_axis
    t_m_ax = grid.t_m_axis
    values = backward_sweep(plant, t_out, solar, q_gains, actions, grid, horizon)

    # greedy rollout through the exact simulator
    state = initial_state
    latch = initial_latch
    seq = np.empty(horizon)
    u_ph_seq = np.empty(horizon)
    t_in_seq = np.empty(horizon)
    t_m_seq = np.empty(horizon)
    total_cost = 0.0
    for k in range(horizon):
        quarter = k + 1
        lo, hi = plant.schedule.bounds(quarter)
        adj = plant.thermostat.with_bounds(lo, hi)
        lo_next, hi_next = _stage_bounds(plant, quarter)
        best = None
        for level in actions:
            action, latch_new = thermostat_apply(state.t_in, level, adj, latch,
                                                 plant.season)
            q_h = thermal_power(action, plant.cop_heat, plant.cop_cool)
            nxt = building_step(state, plant.building, float(t_out[k]),
                                float(q_gains[k]), float(solar[k]), q_h)
            c = action.total * DT_HOURS
            if nxt.t_in < lo_next or nxt.t_in > hi_next:
                c += COMFORT_PENALTY
            cont = float(_interp_values(
                values[k + 1], np.array(int(latch_new)), grid,
                np.array([nxt.t_in]), np.array([nxt.t_m]))[0])
            cand = (c + cont, level, action, latch_new, nxt, c)
            if best is None or cand[0] < best[0]:
                best = cand
        _, level, action, latch, nxt, c = best
        if not (t_in_ax[0] <= nxt.t_in <= t_in_ax[-1]
                and t_m_ax[0] <= nxt.t_m <= t_m_ax[-1]):
            raise GridCoverageError(
                f"rollout left the grid at quarter {quarter}: "
                f"t_in={nxt.t_in:.3f}, t_m={nxt.t_m:.3f}")
        seq[k] = level
        u_ph_seq[k] = action.total
        t_in_seq[k] = state.t_in
        t_m_seq[k] = state.t_m
        total_cost += c
        state = nxt

    return PrescientDayResult(
        actions=seq, u_ph=u_ph_seq, t_in=t_in_seq, t_m=t_m_seq,
        cost=total_cost, energy_wh=float(u_ph_seq.sum() * DT_HOURS),
        final_state=state, final_latch=latch)
