"""Render result CSVs as standalone SVG charts (no display required)."""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

REQUIRED = ["cumulative_energy.csv", "daily_metrics.csv", "trace_learning.csv"]
SMOOTH_WINDOW = 7   # days, moving average on the metric chart


def _read_csv(path: Path) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        cols = {name: [] for name in reader.fieldnames or []}
        for row in reader:
            for name, val in row.items():
                cols[name].append(float(val))
    return {k: np.asarray(v) for k, v in cols.items()}


def _moving_average(x: np.ndarray, window: int) -> np.ndarray:
    if len(x) < window:
        return x.copy()
    kernel = np.ones(window) / window
    out = np.convolve(x, kernel, mode="valid")
    return np.concatenate([np.full(window - 1, np.nan), out])


def emit_plots(result_dir: str | Path) -> list[Path]:
    """Write the three standard charts next to the result CSVs."""
    result_dir = Path(result_dir)
    missing = [name for name in REQUIRED if not (result_dir / name).exists()]
    if missing:
        raise FileNotFoundError(
            f"{result_dir} is missing result files: {missing}")

    out_paths = []
    cum = _read_csv(result_dir / "cumulative_energy.csv")
    fig, ax = plt.subplots(figsize=(7, 4))
    for key, label in (("cum_default_wh", "default"),
                       ("cum_learning_wh", "learning set-back"),
                       ("cum_prescient_wh", "prescient set-back")):
        if key in cum:
            ax.plot(cum["day"], cum[key] / 1000.0, label=label)
    ax.set_xlabel("day")
    ax.set_ylabel("cumulative energy [kWh]")
    ax.legend()
    fig.tight_layout()
    path = result_dir / "cumulative_energy.svg"
    fig.savefig(path)
    plt.close(fig)
    out_paths.append(path)

    metrics = _read_csv(result_dir / "daily_metrics.csv")
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 5), sharex=True)
    ax1.plot(metrics["day"], metrics["m_d"], ".", alpha=0.4, label="daily")
    ax1.plot(metrics["day"], _moving_average(metrics["m_d"], SMOOTH_WINDOW),
             label=f"{SMOOTH_WINDOW}-day mean")
    ax1.set_ylabel("performance M")
    ax1.legend()
    ax2.plot(metrics["day"], metrics["d_d"], ".", alpha=0.4)
    ax2.plot(metrics["day"], _moving_average(metrics["d_d"], SMOOTH_WINDOW))
    ax2.set_ylabel("deviation D [°C]")
    ax2.set_xlabel("day")
    fig.tight_layout()
    path = result_dir / "daily_metrics.svg"
    fig.savefig(path)
    plt.close(fig)
    out_paths.append(path)

    trace = _read_csv(result_dir / "trace_learning.csv")
    steps = 7 * 96
    sel = slice(max(len(trace["step"]) - steps, 0), None)
    hours = trace["step"][sel] / 4.0
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(8, 5), sharex=True)
    ax1.plot(hours, trace["t_in"][sel], label="indoor")
    ax1.plot(hours, trace["t_out"][sel], label="outdoor", alpha=0.6)
    ax1.set_ylabel("temperature [°C]")
    ax1.legend()
    ax2.step(hours, trace["u_ph"][sel], where="post")
    ax2.set_ylabel("electrical draw [W]")
    ax2.set_xlabel("hour")
    fig.tight_layout()
    path = result_dir / "week_profile.svg"
    fig.savefig(path)
    plt.close(fig)
    out_paths.append(path)

    return out_paths
