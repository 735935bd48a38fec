"""Exogenous driving traces: outdoor temperature, solar irradiance, internal gains.

Traces are quarter-hourly (96 steps per day). They can be loaded from a CSV
file (schema ``quarter,t_out_c,solar_wm2,gains_w``) or synthesized from a
seeded generator with season-shaped defaults:

* winter: mean 4 °C daily sinusoid, amplitude 4 °C; solar half-sinusoid
  peaking at 300 W/m² around midday. summer: mean 24 °C, amplitude 5 °C,
  solar peak 800 W/m².
* internal gains follow a two-peak occupancy profile (morning/evening,
  100–600 W).  The real gains profile behind this stand-in is not published,
  so the shape parameters below are assumptions, overridable per call.

Internal gains drive the simulator only; they are never part of the
controller's observable state.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

QUARTERS_PER_DAY = 96

T_OUT_MIN = -40.0
T_OUT_MAX = 50.0


class TraceFormatError(ValueError):
    """A trace value failed validation (names the offending row/column)."""


class TraceLengthError(ValueError):
    """Trace length is not a whole number of days."""


@dataclass(frozen=True)
class ExogenousTrace:
    """Aligned quarter-hourly series driving the building simulator.

    ``timestamps`` is the global quarter index (0-based).  All series share
    one length, a multiple of 96.
    """

    timestamps: np.ndarray
    t_out: np.ndarray      # °C
    solar: np.ndarray      # W/m²
    q_gains: np.ndarray    # W

    def __post_init__(self):
        n = len(self.timestamps)
        if not (len(self.t_out) == len(self.solar) == len(self.q_gains) == n):
            raise TraceLengthError("trace series have differing lengths")
        if n == 0 or n % QUARTERS_PER_DAY != 0:
            raise TraceLengthError(
                f"trace length {n} is not a positive multiple of {QUARTERS_PER_DAY}"
            )
        for name, arr in (("t_out", self.t_out), ("solar", self.solar),
                          ("q_gains", self.q_gains)):
            bad = np.flatnonzero(~np.isfinite(arr))
            if bad.size:
                raise TraceFormatError(f"non-finite {name} at row {bad[0]}")
        neg = np.flatnonzero(self.solar < 0.0)
        if neg.size:
            raise TraceFormatError(f"negative solar value at row {neg[0]}")
        out = np.flatnonzero((self.t_out < T_OUT_MIN) | (self.t_out > T_OUT_MAX))
        if out.size:
            raise TraceFormatError(
                f"t_out out of [{T_OUT_MIN}, {T_OUT_MAX}] °C at row {out[0]}"
            )

    @property
    def n_steps(self) -> int:
        return len(self.timestamps)

    @property
    def n_days(self) -> int:
        return self.n_steps // QUARTERS_PER_DAY


# Season-shaped generator defaults.  Hours are fractional local hours.
SEASON_SHAPES = {
    "winter": dict(t_mean=4.0, t_amp=4.0, t_peak_hour=15.0,
                   solar_peak=300.0, sunrise=8.5, sunset=16.5),
    "summer": dict(t_mean=24.0, t_amp=5.0, t_peak_hour=15.0,
                   solar_peak=800.0, sunrise=6.0, sunset=20.5),
}

GAINS_BASE = 100.0
GAINS_MAX = 600.0


def synthesize_trace(days: int, season: str, seed: int, **shape) -> ExogenousTrace:
    """Generate a seeded synthetic trace for ``days`` days.

    ``shape`` keys override the season defaults in :data:`SEASON_SHAPES`.
    Identical arguments produce bit-identical traces.
    """
    if days < 1:
        raise ValueError(f"days must be >= 1, got {days}")
    if season not in SEASON_SHAPES:
        raise ValueError(f"season must be one of {sorted(SEASON_SHAPES)}, got {season!r}")
    p = dict(SEASON_SHAPES[season])
    unknown = set(shape) - set(p)
    if unknown:
        raise ValueError(f"unknown shape parameters: {sorted(unknown)}")
    p.update(shape)

    rng = np.random.default_rng(seed)
    n = days * QUARTERS_PER_DAY
    idx = np.arange(n)
    hour = (idx % QUARTERS_PER_DAY) * 0.25

    # Outdoor temperature: daily sinusoid + per-day offset + smooth AR(1) noise.
    day_offset = rng.normal(0.0, 1.5, size=days)
    eps = rng.normal(0.0, 0.35, size=n)
    noise = np.empty(n)
    acc = 0.0
    for i in range(n):
        acc = 0.9 * acc + eps[i]
        noise[i] = acc
    t_out = (p["t_mean"]
             + np.repeat(day_offset, QUARTERS_PER_DAY)
             + p["t_amp"] * np.cos(2.0 * np.pi * (hour - p["t_peak_hour"]) / 24.0)
             + noise)
    t_out = np.clip(t_out, T_OUT_MIN, T_OUT_MAX)

    # Solar: clipped half-sinusoid between sunrise and sunset, mild
    # multiplicative cloud noise, zero at night.
    daylight = (hour >= p["sunrise"]) & (hour <= p["sunset"])
    phase = np.where(daylight,
                     (hour - p["sunrise"]) / max(p["sunset"] - p["sunrise"], 1e-9), 0.0)
    solar = p["solar_peak"] * np.sin(np.pi * phase)
    cloud = 1.0 + 0.15 * rng.normal(0.0, 1.0, size=n)
    solar = np.clip(solar * np.where(daylight, cloud, 0.0), 0.0, None)

    # Internal gains: base load plus morning and evening occupancy peaks.
    gains = (GAINS_BASE
             + 300.0 * np.exp(-0.5 * ((hour - 7.5) / 1.5) ** 2)
             + 400.0 * np.exp(-0.5 * ((hour - 19.0) / 2.0) ** 2)
             + 30.0 * rng.normal(0.0, 1.0, size=n))
    gains = np.clip(gains, GAINS_BASE, GAINS_MAX)

    return ExogenousTrace(timestamps=idx, t_out=t_out, solar=solar, q_gains=gains)


DEFAULT_COLUMNS = {"t_out": "t_out_c", "solar": "solar_wm2", "q_gains": "gains_w"}


def load_trace(path: str | Path, column_map: dict[str, str] | None = None) -> ExogenousTrace:
    """Load a quarter-hourly trace from a headered CSV file.

    ``column_map`` maps field names (``t_out``, ``solar``, ``q_gains``) to CSV
    column names; defaults to the shipped schema.
    """
    path = Path(path)
    cols = dict(DEFAULT_COLUMNS)
    if column_map:
        unknown = set(column_map) - set(cols)
        if unknown:
            raise ValueError(f"unknown trace fields in column map: {sorted(unknown)}")
        cols.update(column_map)

    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in cols.values() if c not in header]
        if missing:
            raise TraceFormatError(f"{path}: missing columns {missing}")
        data = {k: [] for k in cols}
        for row_no, row in enumerate(reader):
            for field_name, col in cols.items():
                raw = row.get(col, "")
                try:
                    val = float(raw)
                except (TypeError, ValueError):
                    raise TraceFormatError(
                        f"{path}: cannot parse {col!r} at row {row_no}: {raw!r}"
                    ) from None
                if not math.isfinite(val):
                    raise TraceFormatError(f"{path}: non-finite {col!r} at row {row_no}")
                data[field_name].append(val)

    n = len(data["t_out"])
    if n == 0 or n % QUARTERS_PER_DAY != 0:
        raise TraceLengthError(
            f"{path}: {n} rows is not a positive multiple of {QUARTERS_PER_DAY}"
        )
    return ExogenousTrace(
        timestamps=np.arange(n),
        t_out=np.asarray(data["t_out"]),
        solar=np.asarray(data["solar"]),
        q_gains=np.asarray(data["q_gains"]),
    )


def save_trace(trace: ExogenousTrace, path: str | Path) -> None:
    """Write a trace in the shipped CSV schema; exact float round-trip."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["quarter", "t_out_c", "solar_wm2", "gains_w"])
        for i in range(trace.n_steps):
            writer.writerow([int(trace.timestamps[i]),
                             repr(float(trace.t_out[i])),
                             repr(float(trace.solar[i])),
                             repr(float(trace.q_gains[i]))])
