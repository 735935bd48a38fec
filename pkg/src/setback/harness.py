"""Experiment runner: paired simulation of the three strategies.

Each simulated day of a ``learning-setback`` experiment runs

* offline:  retrain the history auto-encoder on every stored transition,
  re-encode the batch, recompute stage costs, and run fitted Q-iteration to
  get the day's Q-function (day 1 starts with an empty batch and skips
  straight to exploration);
* online:   roll the day with Boltzmann exploration at τ_d = d^-0.7 and
  append the 96 new transitions to the batch;
* in paired lanes, the default constant-set-point controller and the
  prescient day-ahead optimum consume the *same* exogenous trace, each
  evolving its own building state, so daily energies are directly
  comparable.

Outputs are plain CSV files with stable headers and shortest-round-trip
float formatting; identical configs reproduce them byte for byte.  The
``default`` and ``prescient-setback`` strategies run a single lane and emit
only that lane's trace and cumulative energy.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from . import autoencoder
from .baselines import GridSpec, default_policy, prescient_solve
from .config import ExperimentConfig
from .env import (
    ComfortSchedule,
    EnvState,
    Plant,
    StepRecord,
    Transition,
    action_set,
    history_matrix,
    initial_env_state,
    run_day,
    save_batch,
)
from .fqi import build_reduced_batch, fitted_q_iteration, greedy_action
from .metrics import DailyMetrics, metric_deviation, metric_performance
from .policy import boltzmann_probs, exploration_temperature, sample_action
from .rng import derive_seed
from .thermostat import Latch
from .weather import QUARTERS_PER_DAY, load_trace, synthesize_trace
from .env import reduced_state

END_OF_AWAY_QUARTER = 69   # first quarter after the 7h-17h window (17:00)

TRACE_HEADER = ["step", "day", "quarter", "t_in", "t_m", "t_out", "solar",
                "gains", "u_req", "u_ph_hp", "u_ph_aux", "u_ph", "cooling",
                "cost", "violation"]
METRICS_HEADER = ["day", "e_learning_wh", "e_default_wh", "e_prescient_wh",
                  "m_d", "d_d", "violations", "e_greedy_wh"]
CUMULATIVE_HEADER = ["day", "cum_default_wh", "cum_learning_wh",
                     "cum_prescient_wh"]


@dataclass
class ExperimentResult:
    out_dir: Path
    daily: list[DailyMetrics]
    files: dict[str, Path]


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _record_row(step: int, r: StepRecord) -> list:
    return [step, r.day, r.quarter, r.t_in, r.t_m, r.t_out, r.solar, r.q_gains,
            r.u_req, r.u_ph_hp, r.u_ph_aux, r.u_ph, r.cooling, r.cost,
            r.violation]


def _day_energy(records: list[StepRecord]) -> float:
    return sum(r.u_ph for r in records) * 0.25


class _Lane:
    """One controller's evolving closed-loop state and trace."""

    def __init__(self, name: str, plant: Plant, state: EnvState):
        self.name = name
        self.plant = plant
        self.state = state
        self.records: list[StepRecord] = []
        self.daily_energy: list[float] = []

    def advance(self, policy, trace, start_index: int, day: int) -> list[Transition]:
        transitions, records, self.state = run_day(
            self.plant, self.state, policy, trace, start_index, global_day=day)
        self.records.extend(records)
        self.daily_energy.append(_day_energy(records))
        return transitions


def _build_schedules(config: ExperimentConfig) -> tuple[ComfortSchedule, ComfortSchedule]:
    relaxed_high = config.setback_t_high
    if relaxed_high is None and config.season == "summer":
        # cooling seasons relax the ceiling during the away window
        relaxed_high = 27.0
    setback = ComfortSchedule.setback(
        t_low=config.t_low, t_high=config.t_high,
        relaxed_low=config.setback_t_low, relaxed_high=relaxed_high,
        start_quarter=config.setback_start_quarter,
        end_quarter=config.setback_end_quarter)
    constant = ComfortSchedule.constant(config.t_low, config.t_high)
    return setback, constant


def _load_weather(config: ExperimentConfig):
    if config.trace_path:
        trace = load_trace(config.trace_path)
        if trace.n_steps < config.days * QUARTERS_PER_DAY:
            raise ValueError(
                f"trace covers {trace.n_days} days, config asks for {config.days}")
        return trace
    # one trailing day feeds the final transition's landing observation
    return synthesize_trace(config.days + 1, config.season,
                            derive_seed(config.seed, "weather"))


def run_experiment(config: ExperimentConfig,
                   progress: Callable[[str], None] | None = None) -> ExperimentResult:
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    building = config.building_params()
    tstat = config.thermostat_params()
    setback_sched, constant_sched = _build_schedules(config)
    season = config.season
    actions = action_set(season, tstat)
    grid = GridSpec.from_ranges(
        t_in=(config.grid_t_in_lo, config.grid_t_in_hi, config.grid_t_in_step),
        t_m=(config.grid_t_m_lo, config.grid_t_m_hi, config.grid_t_m_step))
    trace = _load_weather(config)

    def plant(schedule):
        return Plant(building=building, thermostat=tstat, schedule=schedule,
                     season=season, cop_heat=config.cop_heat,
                     cop_cool=config.cop_cool)

    def fresh_state():
        return initial_env_state(config.initial_t_in, config.initial_t_m, trace)

    from .extratrees import ExtraTreesConfig
    tree_config = ExtraTreesConfig(n_trees=config.n_trees, n_min=config.n_min)

    if config.strategy == "learning-setback":
        lanes = {
            "learning": _Lane("learning", plant(setback_sched), fresh_state()),
            "default": _Lane("default", plant(constant_sched), fresh_state()),
            "prescient": _Lane("prescient", plant(setback_sched), fresh_state()),
        }
        if config.eval_greedy:
            lanes["learning_greedy"] = _Lane(
                "learning_greedy", plant(setback_sched), fresh_state())
    elif config.strategy == "default":
        lanes = {"default": _Lane("default", plant(constant_sched), fresh_state())}
    else:
        lanes = {"prescient": _Lane("prescient", plant(setback_sched), fresh_state())}

    rng_policy = np.random.default_rng(derive_seed(config.seed, "policy"))
    batch: list[Transition] = []
    daily: list[DailyMetrics] = []
    greedy_energy: list[float] = []

    for day in range(1, config.days + 1):
        try:
            start = (day - 1) * QUARTERS_PER_DAY
            q_function = None
            if "learning" in lanes:
                if batch:
                    encoder = autoencoder.train(
                        history_matrix(batch),
                        seed=derive_seed(config.seed, "autoencoder", day),
                        max_iters=config.ae_max_iters, tol=config.ae_tol)
                    reduced = build_reduced_batch(batch, encoder, setback_sched)
                    q_function = fitted_q_iteration(
                        reduced, actions, iterations=config.fqi_iterations,
                        config=tree_config,
                        seed=derive_seed(config.seed, "fqi", day))
                    tau = exploration_temperature(day, config.decay_exponent)

                    def policy(aug, _q=q_function, _enc=encoder, _tau=tau):
                        x = reduced_state(aug, autoencoder.encode(_enc, aug.z.as_vector()))
                        probs = boltzmann_probs(
                            _q.action_values(x) * config.q_scale, _tau)
                        return float(actions[sample_action(probs, rng_policy)])
                else:

                    def policy(aug):
                        return float(actions[rng_policy.integers(len(actions))])

                batch.extend(lanes["learning"].advance(policy, trace, start, day))

            if "learning_greedy" in lanes:
                if q_function is None:
                    greedy_policy = lambda aug: float(actions[0])
                else:
                    def greedy_policy(aug, _q=q_function, _enc=encoder):
                        x = reduced_state(aug, autoencoder.encode(_enc, aug.z.as_vector()))
                        return greedy_action(_q, x)
                lanes["learning_greedy"].advance(greedy_policy, trace, start, day)
                greedy_energy.append(lanes["learning_greedy"].daily_energy[-1])

            if "default" in lanes:
                lanes["default"].advance(
                    lambda aug: default_policy(aug.obs.t_in, season, tstat,
                                               config.default_target),
                    trace, start, day)

            if "prescient" in lanes:
                lane = lanes["prescient"]
                sl = slice(start, start + QUARTERS_PER_DAY)
                solved = prescient_solve(
                    lane.plant, trace.t_out[sl], trace.solar[sl],
                    trace.q_gains[sl], lane.state.sim, lane.state.latch,
                    actions, grid)
                replay = iter(solved.actions)
                lane.advance(lambda aug: float(next(replay)), trace, start, day)

            if config.strategy == "learning-setback":
                learn_records = lanes["learning"].records[-QUARTERS_PER_DAY:]
                t_in_17 = next(r.t_in for r in learn_records
                               if r.quarter == END_OF_AWAY_QUARTER)
                daily.append(DailyMetrics(
                    day=day,
                    e_learning=lanes["learning"].daily_energy[-1],
                    e_default=lanes["default"].daily_energy[-1],
                    e_prescient=lanes["prescient"].daily_energy[-1],
                    m_d=metric_performance(lanes["learning"].daily_energy[-1],
                                           lanes["default"].daily_energy[-1],
                                           lanes["prescient"].daily_energy[-1]),
                    d_d=metric_deviation(
                        t_in_17, setback_sched.bounds(END_OF_AWAY_QUARTER)),
                    violations=sum(r.violation for r in learn_records),
                ))
            if progress is not None:
                last = daily[-1] if daily else None
                msg = f"day {day:3d}/{config.days}"
                if last is not None:
                    msg += (f"  e_l={last.e_learning:9.1f}  e_d={last.e_default:9.1f}"
                            f"  e_p={last.e_prescient:9.1f}  m_d={last.m_d:7.3f}"
                            f"  d_d={last.d_d:5.2f}")
                progress(msg)
        except Exception as exc:
            raise RuntimeError(f"experiment aborted on day {day}: {exc}") from exc

    files: dict[str, Path] = {}
    for key, lane in lanes.items():
        path = out_dir / f"trace_{key}.csv"
        _write_csv(path, TRACE_HEADER,
                   (_record_row(i, r) for i, r in enumerate(lane.records)))
        files[f"trace_{key}"] = path

    if config.strategy == "learning-setback":
        rows = []
        for i, m in enumerate(daily):
            e_greedy = greedy_energy[i] if config.eval_greedy else math.nan
            rows.append([m.day, m.e_learning, m.e_default, m.e_prescient,
                         m.m_d, m.d_d, m.violations, e_greedy])
        path = out_dir / "daily_metrics.csv"
        _write_csv(path, METRICS_HEADER, rows)
        files["daily_metrics"] = path

        cum = {name: np.cumsum(lanes[name].daily_energy)
               for name in ("default", "learning", "prescient")}
        path = out_dir / "cumulative_energy.csv"
        _write_csv(path, CUMULATIVE_HEADER,
                   ([d + 1, cum["default"][d], cum["learning"][d],
                     cum["prescient"][d]] for d in range(config.days)))
        files["cumulative_energy"] = path

        path = out_dir / "batch.csv"
        save_batch(batch, path)
        files["batch"] = path
    else:
        name = next(iter(lanes))
        path = out_dir / "cumulative_energy.csv"
        _write_csv(path, ["day", f"cum_{name}_wh"],
                   ([d + 1, e] for d, e in
                    enumerate(np.cumsum(lanes[name].daily_energy))))
        files["cumulative_energy"] = path

    return ExperimentResult(out_dir=out_dir, daily=daily, files=files)
