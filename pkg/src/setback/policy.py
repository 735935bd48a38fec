"""Boltzmann action selection with a harmonically decaying temperature.

Q-values are costs, so selection weights are ``exp(-Q/τ)``: cheaper actions
get more probability mass, and τ → 0 recovers the greedy argmin.  The
temperature follows τ_d = d^(-n) over the day counter d ≥ 1 (default
exponent 0.7), so exploration decays but never switches off.
"""

from __future__ import annotations

import numpy as np

DECAY_EXPONENT = 0.7


def exploration_temperature(day: int, exponent: float = DECAY_EXPONENT) -> float:
    if day < 1:
        raise ValueError(f"day counter starts at 1, got {day}")
    return float(day) ** (-exponent)


def boltzmann_probs(q_values: np.ndarray, tau: float) -> np.ndarray:
    """Selection probabilities over actions given their predicted costs.

    Stabilized with a max shift; for τ ≤ 0 callers must pick greedily
    instead.
    """
    if tau <= 0.0:
        raise ValueError("tau must be positive; use greedy selection at tau = 0")
    q = np.asarray(q_values, dtype=float)
    logits = -q / tau
    logits -= logits.max()
    w = np.exp(logits)
    return w / w.sum()


def sample_action(probs: np.ndarray, rng: np.random.Generator) -> int:
    """Inverse-CDF draw; returns the sampled action index."""
    probs = np.asarray(probs, dtype=float)
    cdf = np.cumsum(probs)
    r = rng.random()
    return min(int(np.searchsorted(cdf, r, side="right")), len(probs) - 1)
