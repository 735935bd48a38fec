import numpy as np
import pytest

from setback.policy import boltzmann_probs, exploration_temperature, sample_action


def test_uniform_probabilities_for_equal_q():
    probs = boltzmann_probs(np.full(10, 3.7), tau=1.0)
    assert np.allclose(probs, 0.1, atol=1e-15)
    assert abs(probs.sum() - 1.0) < 1e-12


def test_tiny_temperature_concentrates_on_argmin():
    q = np.array([5.0, 1.0, 3.0, 4.0, 2.0])
    probs = boltzmann_probs(q, tau=1e-6)
    assert probs[1] >= 0.999


def test_day_one_temperature_is_one():
    assert exploration_temperature(1) == 1.0


def test_temperature_strictly_decreasing():
    taus = [exploration_temperature(d) for d in range(1, 200)]
    assert all(b < a for a, b in zip(taus, taus[1:]))
    assert all(t > 0.0 for t in taus)


def test_temperature_rejects_day_zero():
    with pytest.raises(ValueError):
        exploration_temperature(0)


def test_shift_invariance():
    rng = np.random.default_rng(0)
    q = rng.normal(size=10)
    a = boltzmann_probs(q, tau=0.8)
    b = boltzmann_probs(q + 123.456, tau=0.8)
    assert np.max(np.abs(a - b)) < 1e-12


def test_lower_cost_gets_weakly_higher_probability():
    q = np.array([4.0, 2.0, 2.0, 9.0])
    probs = boltzmann_probs(q, tau=1.0)
    order = np.argsort(q)
    sorted_probs = probs[order]
    assert all(a >= b - 1e-15 for a, b in zip(sorted_probs, sorted_probs[1:]))


def test_tau_zero_rejected():
    with pytest.raises(ValueError):
        boltzmann_probs(np.zeros(3), tau=0.0)


def test_degenerate_probs_always_sample_that_index():
    probs = np.zeros(10)
    probs[3] = 1.0
    rng = np.random.default_rng(0)
    assert all(sample_action(probs, rng) == 3 for _ in range(100))


def test_sampling_is_seed_deterministic():
    probs = boltzmann_probs(np.arange(10.0), tau=2.0)
    a = [sample_action(probs, np.random.default_rng(42)) for _ in range(5)]
    b = [sample_action(probs, np.random.default_rng(42)) for _ in range(5)]
    assert a == b


def test_empirical_frequencies_match_probabilities():
    probs = boltzmann_probs(np.array([0.0, 1.0, 2.0, 5.0]), tau=1.5)
    rng = np.random.default_rng(7)
    n = 100_000
    counts = np.zeros(4)
    for _ in range(n):
        counts[sample_action(probs, rng)] += 1
    freq = counts / n
    sigma = np.sqrt(probs * (1.0 - probs) / n)
    assert (np.abs(freq - probs) <= 3.0 * sigma + 1e-12).all()


def test_extreme_q_values_stay_finite():
    probs = boltzmann_probs(np.array([1e9, 0.0, -1e9]), tau=1.0)
    assert np.isfinite(probs).all()
    assert abs(probs.sum() - 1.0) < 1e-12
