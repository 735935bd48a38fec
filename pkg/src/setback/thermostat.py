"""Thermostat override logic with auxiliary-heating and cooling latches.

The thermostat maps a requested electrical level to the physical action the
equipment actually executes.  Outside the free band the request is ignored:

* t_in < t_low − t_b_aux        → heat pump plus auxiliary element, latched
  until t_in ≥ t_low + t_b;
* t_low − t_b_aux ≤ t_in ≤ t_low + t_b → heat pump at full power;
* t_low + t_b < t_in < t_high   → the request passes through (heating draw
  in winter, cooling draw in summer);
* t_in ≥ t_high                 → cooling at full power, latched until
  t_in ≤ t_high − t_b.

Latches are explicit values carried between steps, which keeps ``apply`` a
pure function.  Set-back schedules substitute time-varying set points into
the parameter set before calling ``apply``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import IntEnum

import numpy as np


class Latch(IntEnum):
    FREE = 0
    AUX_HEAT = 1
    COOLING = 2


@dataclass(frozen=True)
class ThermostatParams:
    """Set points, hysteresis bands and equipment power ratings (electrical W)."""

    t_low: float = 20.0     # lower set point, °C
    t_high: float = 22.5    # upper set point, °C
    t_b: float = 0.5        # hysteresis band, °C
    t_b_aux: float = 1.5    # auxiliary activation band, °C
    p_h: float = 2500.0     # heat-pump heating draw, W
    p_c: float = 2500.0     # heat-pump cooling draw, W
    p_aux: float = 3000.0   # auxiliary element draw, W

    def __post_init__(self):
        if not (self.t_b_aux > self.t_b > 0.0):
            raise ValueError("need t_b_aux > t_b > 0")
        if not (self.t_low + self.t_b < self.t_high - self.t_b):
            raise ValueError("hysteresis bands overlap: t_low+t_b must be < t_high-t_b")
        if min(self.p_h, self.p_c, self.p_aux) <= 0.0:
            raise ValueError("equipment powers must be strictly positive")

    def with_bounds(self, t_low: float, t_high: float) -> "ThermostatParams":
        """Schedule-adjusted copy (set-back substitutes relaxed set points)."""
        return replace(self, t_low=t_low, t_high=t_high)


@dataclass(frozen=True)
class PhysicalAction:
    """Executed electrical draws; ``cooling`` marks heat extraction."""

    u_ph_hp: float           # heat-pump draw, W
    u_ph_aux: float = 0.0    # auxiliary draw, W
    cooling: bool = False

    @property
    def total(self) -> float:
        return self.u_ph_hp + self.u_ph_aux


def apply(t_in: float, requested: float, params: ThermostatParams,
          latch: Latch, season: str = "winter") -> tuple[PhysicalAction, Latch]:
    """Map a requested level to the physical action, updating the latch.

    A latch keeps its override active until the exit threshold is crossed;
    on exit the branches are re-evaluated in free mode for the same step.
    """
    if latch == Latch.AUX_HEAT:
        if t_in < params.t_low + params.t_b:
            return PhysicalAction(params.p_h, params.p_aux), Latch.AUX_HEAT
    elif latch == Latch.COOLING:
        if t_in > params.t_high - params.t_b:
            return PhysicalAction(params.p_c, cooling=True), Latch.COOLING

    if t_in < params.t_low - params.t_b_aux:
        return PhysicalAction(params.p_h, params.p_aux), Latch.AUX_HEAT
    if t_in <= params.t_low + params.t_b:
        return PhysicalAction(params.p_h), Latch.FREE
    if t_in < params.t_high:
        # pass-through, clamped to the equipment rating of the active mode
        cap = params.p_c if season == "summer" else params.p_h
        level = min(max(float(requested), 0.0), cap)
        return PhysicalAction(level, cooling=(season == "summer")), Latch.FREE
    return PhysicalAction(params.p_c, cooling=True), Latch.COOLING


def apply_array(t_in: np.ndarray, requested: float, params: ThermostatParams,
                latch: Latch, season: str = "winter"):
    """Vectorized :func:`apply` for one latch value over a temperature grid.

    Returns ``(u_ph_hp, u_ph_aux, cooling, latch_next)`` arrays aligned with
    ``t_in``.  Semantics match the scalar function exactly.
    """
    t_in = np.asarray(t_in, dtype=float)
    n = t_in.shape[0]
    u_hp = np.empty(n)
    u_aux = np.zeros(n)
    cooling = np.zeros(n, dtype=bool)
    latch_next = np.full(n, int(Latch.FREE), dtype=np.int64)

    if latch == Latch.AUX_HEAT:
        held = t_in < params.t_low + params.t_b
    elif latch == Latch.COOLING:
        held = t_in > params.t_high - params.t_b
    else:
        held = np.zeros(n, dtype=bool)

    aux_on = (t_in < params.t_low - params.t_b_aux) & ~held
    forced_hp = (~aux_on) & (t_in <= params.t_low + params.t_b) & ~held
    free = (~aux_on) & (~forced_hp) & (t_in < params.t_high) & ~held
    cool_on = (~aux_on) & (~forced_hp) & (~free) & ~held

    if held.any():
        if latch == Latch.AUX_HEAT:
            u_hp[held] = params.p_h
            u_aux[held] = params.p_aux
            latch_next[held] = int(Latch.AUX_HEAT)
        else:
            u_hp[held] = params.p_c
            cooling[held] = True
            latch_next[held] = int(Latch.COOLING)
    u_hp[aux_on] = params.p_h
    u_aux[aux_on] = params.p_aux
    latch_next[aux_on] = int(Latch.AUX_HEAT)
    u_hp[forced_hp] = params.p_h
    cap = params.p_c if season == "summer" else params.p_h
    u_hp[free] = min(max(float(requested), 0.0), cap)
    if season == "summer":
        cooling[free] = True
    u_hp[cool_on] = params.p_c
    cooling[cool_on] = True
    latch_next[cool_on] = int(Latch.COOLING)

    return u_hp, u_aux, cooling, latch_next
