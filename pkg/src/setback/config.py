"""Experiment configuration: building presets, defaults, INI round-trip.

Every tunable the pipeline uses lives here with its shipped default, so a
config file only needs to override what an experiment changes.  Files use
flat ``key = value`` pairs under plain sections (configparser syntax); see
``configs/`` for shipped examples.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .building import BuildingParams
from .thermostat import ThermostatParams

# Lumped-parameter presets: a leaky envelope and a tight one.  The remaining
# coefficients are shared.
PRESETS = {
    "low_insulation": dict(u_a=1154.0, h_m=6863.0, c_a=2.441e6, c_m=9.896e6),
    "high_insulation": dict(u_a=272.0, h_m=6863.0, c_a=2.441e6, c_m=9.896e6),
}

STRATEGIES = ("default", "learning-setback", "prescient-setback")


@dataclass(frozen=True)
class ExperimentConfig:
    # [experiment]
    days: int = 100
    season: str = "winter"
    seed: int = 0
    strategy: str = "learning-setback"
    building_preset: str = "high_insulation"
    out_dir: str = "results"
    initial_t_in: float = 20.0
    initial_t_m: float = 20.0
    eval_greedy: bool = False

    # [building]  (preset overridable field by field)
    u_a: float | None = None
    h_m: float | None = None
    c_a: float | None = None
    c_m: float | None = None
    alpha_frac: float = 0.5
    beta_frac: float = 0.5
    solar_aperture: float = 9.0
    cop_heat: float = 3.0
    cop_cool: float = 3.0

    # [thermostat]
    t_low: float = 20.0
    t_high: float = 22.5
    t_b: float = 0.5
    t_b_aux: float = 1.5
    p_h: float = 2500.0
    p_c: float = 2500.0
    p_aux: float = 3000.0

    # [schedule]  away window 7h-17h = quarters 29..68
    setback_t_low: float = 15.0
    setback_t_high: float | None = None   # cooling seasons raise the upper bound
    setback_start_quarter: int = 29
    setback_end_quarter: int = 68
    default_target: float = 20.5

    # [weather]  empty path = synthesize days+1 from the seed
    trace_path: str = ""

    # [exploration]
    decay_exponent: float = 0.7
    # scale applied to Q before the softmax; Wh-scale values saturate
    # exp(-Q/tau) into pure greed at any tau <= 1, so exploration acts on
    # kWh-scale values by default
    q_scale: float = 1e-3

    # [autoencoder]
    ae_max_iters: int = 500
    ae_tol: float = 1e-6

    # [fqi]
    n_trees: int = 60
    n_min: int = 3
    fqi_iterations: int = 96

    # [grid]
    grid_t_in_lo: float = 14.0
    grid_t_in_hi: float = 26.0
    grid_t_in_step: float = 0.1
    grid_t_m_lo: float = 10.0
    grid_t_m_hi: float = 30.0
    grid_t_m_step: float = 0.2

    def __post_init__(self):
        if self.days < 1:
            raise ValueError("days must be >= 1")
        if self.season not in ("winter", "summer"):
            raise ValueError(f"unknown season {self.season!r}")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"strategy must be one of {STRATEGIES}")
        if self.building_preset not in PRESETS:
            raise ValueError(f"unknown building preset {self.building_preset!r}; "
                             f"available: {sorted(PRESETS)}")

    def building_params(self) -> BuildingParams:
        preset = PRESETS[self.building_preset]
        return BuildingParams(
            u_a=self.u_a if self.u_a is not None else preset["u_a"],
            h_m=self.h_m if self.h_m is not None else preset["h_m"],
            c_a=self.c_a if self.c_a is not None else preset["c_a"],
            c_m=self.c_m if self.c_m is not None else preset["c_m"],
            alpha_frac=self.alpha_frac, beta_frac=self.beta_frac,
            solar_aperture=self.solar_aperture)

    def thermostat_params(self) -> ThermostatParams:
        return ThermostatParams(t_low=self.t_low, t_high=self.t_high,
                                t_b=self.t_b, t_b_aux=self.t_b_aux,
                                p_h=self.p_h, p_c=self.p_c, p_aux=self.p_aux)


_SECTIONS = {
    "experiment": ["days", "season", "seed", "strategy", "building_preset",
                   "out_dir", "initial_t_in", "initial_t_m", "eval_greedy"],
    "building": ["u_a", "h_m", "c_a", "c_m", "alpha_frac", "beta_frac",
                 "solar_aperture", "cop_heat", "cop_cool"],
    "thermostat": ["t_low", "t_high", "t_b", "t_b_aux", "p_h", "p_c", "p_aux"],
    "schedule": ["setback_t_low", "setback_t_high", "setback_start_quarter",
                 "setback_end_quarter", "default_target"],
    "weather": ["trace_path"],
    "exploration": ["decay_exponent", "q_scale"],
    "autoencoder": ["ae_max_iters", "ae_tol"],
    "fqi": ["n_trees", "n_min", "fqi_iterations"],
    "grid": ["grid_t_in_lo", "grid_t_in_hi", "grid_t_in_step",
             "grid_t_m_lo", "grid_t_m_hi", "grid_t_m_step"],
}

_FIELD_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}
_INT_FIELDS = {"days", "seed", "setback_start_quarter", "setback_end_quarter",
               "ae_max_iters", "n_trees", "n_min", "fqi_iterations"}
_BOOL_FIELDS = {"eval_greedy"}
_STR_FIELDS = {"season", "strategy", "building_preset", "out_dir", "trace_path"}
_OPTIONAL_FLOAT_FIELDS = {"u_a", "h_m", "c_a", "c_m", "setback_t_high"}


def load_config(path: str | Path) -> ExperimentConfig:
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise FileNotFoundError(f"config file not found: {path}")
    kwargs = {}
    for section, keys in _SECTIONS.items():
        if not parser.has_section(section):
            continue
        for key, raw in parser.items(section):
            if key not in keys:
                raise ValueError(f"unknown key {key!r} in section [{section}]")
            if key in _STR_FIELDS:
                kwargs[key] = raw
            elif key in _BOOL_FIELDS:
                kwargs[key] = parser.getboolean(section, key)
            elif key in _INT_FIELDS:
                kwargs[key] = int(raw)
            elif key in _OPTIONAL_FLOAT_FIELDS:
                kwargs[key] = None if raw.strip().lower() in ("", "none") else float(raw)
            else:
                kwargs[key] = float(raw)
    return ExperimentConfig(**kwargs)


def save_config(config: ExperimentConfig, path: str | Path) -> None:
    parser = configparser.ConfigParser()
    for section, keys in _SECTIONS.items():
        parser.add_section(section)
        for key in keys:
            value = getattr(config, key)
            parser.set(section, key, "none" if value is None else str(value))
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        parser.write(fh)
