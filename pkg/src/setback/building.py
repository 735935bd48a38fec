"""Two-node equivalent-thermal-parameter (ETP) building model.

State is the indoor air temperature ``t_in`` and the lumped envelope/mass
temperature ``t_m``.  The continuous-time dynamics are the classic two-node
RC network:

    C_a · dT_in/dt = H_m·(T_m − T_in) − U_a·(T_in − T_out) + Q_i
    C_m · dT_m/dt  = H_m·(T_in − T_m) + Q_m

where U_a couples the air node to ambient and H_m couples air to mass.
Heat injected into the air node, Q_i, is the air fraction of internal and
solar gains plus the full HVAC thermal output; the mass node receives the
remaining gain fractions:

    Q_i = α·Q_g + β·Q_s + Q_h          Q_m = (1−α)·Q_g + (1−β)·Q_s

with Q_s = irradiance × effective solar aperture.

A control period is 900 s, integrated with 60 forward-Euler sub-steps of
15 s.  The fastest time constant for the shipped parameter sets is
C_a/(U_a+H_m) ≈ 304 s, so 15 s Euler is comfortably stable.  The one-step
map is affine in (t_in, t_m, t_out, q_g, solar, q_h); callers that need the
map in closed form (e.g. dynamic programming over a state grid) can extract
its coefficients with :func:`step_affine_map`.

Nothing is clamped: a non-finite state after a step raises
:class:`NumericDivergenceError` instead of being hidden.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DT_CONTROL = 900.0   # s, one quarter-hour
N_SUBSTEPS = 60      # 15 s Euler sub-steps per control period


class NumericDivergenceError(ArithmeticError):
    """The integrator produced a non-finite state."""


@dataclass(frozen=True)
class BuildingParams:
    """Lumped ETP parameters.

    Conductances in W/°C, thermal masses in J/°C.  ``alpha_frac`` and
    ``beta_frac`` are the air-node shares of internal and solar gains;
    ``solar_aperture`` (m²) converts irradiance to solar gain power.
    """

    u_a: float                  # air ↔ ambient conductance
    h_m: float                  # air ↔ mass conductance
    c_a: float                  # air thermal mass
    c_m: float                  # envelope thermal mass
    alpha_frac: float = 0.5
    beta_frac: float = 0.5
    solar_aperture: float = 9.0

    def __post_init__(self):
        for name in ("u_a", "h_m", "c_a", "c_m"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be strictly positive")
        for name in ("alpha_frac", "beta_frac"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if self.solar_aperture < 0.0:
            raise ValueError("solar_aperture must be non-negative")


@dataclass(frozen=True)
class BuildingState:
    t_in: float  # °C, indoor air
    t_m: float   # °C, envelope mass


def derivatives(state: BuildingState, params: BuildingParams,
                t_out: float, q_i: float, q_m: float) -> tuple[float, float]:
    """Right-hand sides (dT_in/dt, dT_m/dt) in °C/s."""
    d_tin = (state.t_m * params.h_m
             - state.t_in * (params.u_a + params.h_m)
             + q_i
             + t_out * params.u_a) / params.c_a
    d_tm = (params.h_m * (state.t_in - state.t_m) + q_m) / params.c_m
    return d_tin, d_tm


def split_gains(q_g: float, solar: float, q_h_thermal: float,
                params: BuildingParams) -> tuple[float, float]:
    """Split internal, solar and HVAC heat between the air and mass nodes.

    ``solar`` is irradiance in W/m²; the HVAC term (positive heating,
    negative cooling) goes entirely to the air node.  Conservation:
    q_i + q_m = q_g + solar·aperture + q_h_thermal.
    """
    q_s = solar * params.solar_aperture
    q_i = params.alpha_frac * q_g + params.beta_frac * q_s + q_h_thermal
    q_m = (1.0 - params.alpha_frac) * q_g + (1.0 - params.beta_frac) * q_s
    return q_i, q_m


def step(state: BuildingState, params: BuildingParams, t_out: float,
         q_g: float, solar: float, q_h_thermal: float,
         dt: float = DT_CONTROL, n_sub: int = N_SUBSTEPS) -> BuildingState:
    """Integrate one control period with forward-Euler sub-steps."""
    q_i, q_m = split_gains(q_g, solar, q_h_thermal, params)
    h = dt / n_sub
    # Locals bound once; the sub-step loop is a hot path.
    u_a, h_m, c_a, c_m = params.u_a, params.h_m, params.c_a, params.c_m
    t_in, t_m = state.t_in, state.t_m
    for _ in range(n_sub):
        d_tin = (t_m * h_m - t_in * (u_a + h_m) + q_i + t_out * u_a) / c_a
        d_tm = (h_m * (t_in - t_m) + q_m) / c_m
        t_in = t_in + h * d_tin
        t_m = t_m + h * d_tm
    if not (math.isfinite(t_in) and math.isfinite(t_m)):
        raise NumericDivergenceError(
            f"state diverged after {n_sub} sub-steps: t_in={t_in}, t_m={t_m}"
        )
    return BuildingState(t_in=t_in, t_m=t_m)


def step_array(t_in: np.ndarray, t_m: np.ndarray, params: BuildingParams,
               t_out, q_g, solar, q_h_thermal,
               dt: float = DT_CONTROL, n_sub: int = N_SUBSTEPS):
    """Vectorized :func:`step` over aligned state arrays (no divergence check)."""
    q_s = np.asarray(solar) * params.solar_aperture
    q_i = params.alpha_frac * np.asarray(q_g) + params.beta_frac * q_s + np.asarray(q_h_thermal)
    q_m = (1.0 - params.alpha_frac) * np.asarray(q_g) + (1.0 - params.beta_frac) * q_s
    h = dt / n_sub
    u_a, h_m, c_a, c_m = params.u_a, params.h_m, params.c_a, params.c_m
    t_in = np.array(t_in, dtype=float, copy=True)
    t_m = np.array(t_m, dtype=float, copy=True)
    for _ in range(n_sub):
        d_tin = (t_m * h_m - t_in * (u_a + h_m) + q_i + t_out * u_a) / c_a
        d_tm = (h_m * (t_in - t_m) + q_m) / c_m
        t_in = t_in + h * d_tin
        t_m = t_m + h * d_tm
    return t_in, t_m


def step_affine_map(params: BuildingParams, dt: float = DT_CONTROL,
                    n_sub: int = N_SUBSTEPS) -> tuple[np.ndarray, np.ndarray]:
    """Coefficients (M, N) of the one-step map.

    next_state = M @ (t_in, t_m) + N @ (t_out, q_g, solar, q_h_thermal).
    Extracted by probing :func:`step` on unit inputs; agrees with the
    iterated integrator to rounding error.
    """
    zero = step(BuildingState(0.0, 0.0), params, 0.0, 0.0, 0.0, 0.0, dt, n_sub)
    z = np.array([zero.t_in, zero.t_m])  # exactly zero, kept for clarity
    M = np.empty((2, 2))
    for j, st in enumerate((BuildingState(1.0, 0.0), BuildingState(0.0, 1.0))):
        out = step(st, params, 0.0, 0.0, 0.0, 0.0, dt, n_sub)
        M[:, j] = (out.t_in - z[0], out.t_m - z[1])
    N = np.empty((2, 4))
    probes = [(1.0, 0.0, 0.0, 0.0), (0.0, 1.0, 0.0, 0.0),
              (0.0, 0.0, 1.0, 0.0), (0.0, 0.0, 0.0, 1.0)]
    for j, (t_out, q_g, solar, q_h) in enumerate(probes):
        out = step(BuildingState(0.0, 0.0), params, t_out, q_g, solar, q_h, dt, n_sub)
        N[:, j] = (out.t_in - z[0], out.t_m - z[1])
    return M, N
