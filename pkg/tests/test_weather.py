import numpy as np
import pytest

from setback.weather import (
    QUARTERS_PER_DAY,
    ExogenousTrace,
    TraceFormatError,
    TraceLengthError,
    load_trace,
    save_trace,
    synthesize_trace,
)


def test_synthesis_is_deterministic():
    a = synthesize_trace(days=1, season="winter", seed=7)
    b = synthesize_trace(days=1, season="winter", seed=7)
    assert np.array_equal(a.t_out, b.t_out)
    assert np.array_equal(a.solar, b.solar)
    assert np.array_equal(a.q_gains, b.q_gains)


def test_two_summer_days_have_192_steps():
    tr = synthesize_trace(days=2, season="summer", seed=1)
    assert tr.n_steps == 192
    assert tr.n_days == 2


def test_winter_trace_has_heating_demand():
    tr = synthesize_trace(days=5, season="winter", seed=3)
    assert tr.t_out.min() < 20.0


@pytest.mark.parametrize("season", ["winter", "summer"])
@pytest.mark.parametrize("seed", [0, 11, 42])
def test_generated_traces_satisfy_invariants(season, seed):
    tr = synthesize_trace(days=3, season=season, seed=seed)
    assert tr.n_steps % QUARTERS_PER_DAY == 0
    assert (tr.solar >= 0.0).all()
    assert np.isfinite(tr.t_out).all()
    assert (tr.t_out >= -40.0).all() and (tr.t_out <= 50.0).all()
    assert (tr.q_gains >= 0.0).all()


def test_season_means_match_defaults():
    w = synthesize_trace(days=20, season="winter", seed=5)
    s = synthesize_trace(days=20, season="summer", seed=5)
    assert abs(w.t_out.mean() - 4.0) < 1.5
    assert abs(s.t_out.mean() - 24.0) < 1.5
    assert w.solar.max() <= 300.0 * 1.8
    assert s.solar.max() > 500.0


def test_days_below_one_rejected():
    with pytest.raises(ValueError):
        synthesize_trace(days=0, season="winter", seed=0)


def test_round_trip_is_exact(tmp_path):
    tr = synthesize_trace(days=3, season="winter", seed=9)
    path = tmp_path / "trace.csv"
    save_trace(tr, path)
    back = load_trace(path)
    assert back.n_steps == 288
    assert np.array_equal(back.t_out, tr.t_out)
    assert np.array_equal(back.solar, tr.solar)
    assert np.array_equal(back.q_gains, tr.q_gains)


def test_negative_solar_rejected_with_row(tmp_path):
    path = tmp_path / "bad.csv"
    n = QUARTERS_PER_DAY
    with open(path, "w") as fh:
        fh.write("quarter,t_out_c,solar_wm2,gains_w\n")
        for i in range(n):
            solar = -5.0 if i == 17 else 0.0
            fh.write(f"{i},4.0,{solar},100.0\n")
    with pytest.raises(TraceFormatError, match="row 17"):
        load_trace(path)


def test_partial_day_rejected(tmp_path):
    path = tmp_path / "short.csv"
    with open(path, "w") as fh:
        fh.write("quarter,t_out_c,solar_wm2,gains_w\n")
        for i in range(100):
            fh.write(f"{i},4.0,0.0,100.0\n")
    with pytest.raises(TraceLengthError):
        load_trace(path)


def test_unparseable_cell_names_row_and_column(tmp_path):
    path = tmp_path / "garbled.csv"
    with open(path, "w") as fh:
        fh.write("quarter,t_out_c,solar_wm2,gains_w\n")
        for i in range(QUARTERS_PER_DAY):
            val = "oops" if i == 3 else "4.0"
            fh.write(f"{i},{val},0.0,100.0\n")
    with pytest.raises(TraceFormatError, match="t_out_c.*row 3"):
        load_trace(path)


def test_column_map_renames_columns(tmp_path):
    path = tmp_path / "renamed.csv"
    with open(path, "w") as fh:
        fh.write("idx,temp,irr,internal\n")
        for i in range(QUARTERS_PER_DAY):
            fh.write(f"{i},4.5,10.0,150.0\n")
    tr = load_trace(path, column_map={"t_out": "temp", "solar": "irr",
                                      "q_gains": "internal"})
    assert tr.t_out[0] == 4.5


def test_direct_construction_validates_lengths():
    with pytest.raises(TraceLengthError):
        ExogenousTrace(np.arange(96), np.zeros(96), np.zeros(95), np.zeros(96))
