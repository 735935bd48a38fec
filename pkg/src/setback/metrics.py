"""Daily evaluation metrics comparing the three control strategies."""

from __future__ import annotations

import math
from dataclasses import dataclass


def metric_deviation(t_in_17: float, bounds_17: tuple[float, float]) -> float:
    """Comfort deviation (°C) at the end of the away window (17h).

    Zero inside the band, otherwise the distance to the nearest bound.
    """
    lo, hi = bounds_17
    return max(t_in_17 - hi, 0.0) + max(lo - t_in_17, 0.0)


def metric_performance(e_learning: float, e_default: float, e_prescient: float) -> float:
    """Interpolation of the learning agent's daily energy between anchors.

    0 means default-equivalent, 1 prescient-equivalent.  Undefined (NaN)
    when the anchors coincide.
    """
    if e_prescient == e_default:
        return math.nan
    return (e_learning - e_default) / (e_prescient - e_default)


@dataclass(frozen=True)
class DailyMetrics:
    day: int
    e_learning: float     # Wh
    e_default: float
    e_prescient: float
    m_d: float            # NaN marks an undefined day
    d_d: float            # °C, never negative
    violations: int       # learning-lane comfort violations that day

    def __post_init__(self):
        if self.d_d < 0.0:
            raise ValueError("daily deviation cannot be negative")
