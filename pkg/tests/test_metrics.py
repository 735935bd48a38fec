import math

import pytest

from setback.metrics import DailyMetrics, metric_deviation, metric_performance


def test_deviation_zero_inside_band():
    assert metric_deviation(21.0, (20.0, 22.5)) == 0.0


def test_deviation_below_band():
    assert metric_deviation(19.2, (20.0, 22.5)) == pytest.approx(0.8)


def test_deviation_above_band():
    assert metric_deviation(23.0, (20.0, 22.5)) == pytest.approx(0.5)


def test_deviation_at_bounds_is_zero():
    assert metric_deviation(20.0, (20.0, 22.5)) == 0.0
    assert metric_deviation(22.5, (20.0, 22.5)) == 0.0


def test_performance_zero_at_default():
    assert metric_performance(10_000.0, 10_000.0, 9_000.0) == 0.0


def test_performance_one_at_prescient():
    assert metric_performance(9_000.0, 10_000.0, 9_000.0) == 1.0


def test_performance_interpolates():
    assert metric_performance(9_500.0, 10_000.0, 9_000.0) == pytest.approx(0.5)


def test_performance_undefined_marker():
    assert math.isnan(metric_performance(9_500.0, 9_000.0, 9_000.0))


def test_daily_metrics_rejects_negative_deviation():
    with pytest.raises(ValueError):
        DailyMetrics(day=1, e_learning=1.0, e_default=1.0, e_prescient=1.0,
                     m_d=0.0, d_d=-0.1, violations=0)
