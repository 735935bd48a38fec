"""Command-line entry points.

    setback gen-weather --days 40 --season winter --seed 1 --out w.csv
    setback run --config configs/winter_high.ini [--eval-greedy]
    setback baseline --kind prescient --building high_insulation \
        --season winter --trace w.csv --out results/
    setback plot --dir results/
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from .config import PRESETS, ExperimentConfig, load_config
from .harness import run_experiment
from .plots import emit_plots
from .weather import save_trace, synthesize_trace


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="setback",
                                     description="heat-pump set-back experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen-weather", help="synthesize an exogenous trace CSV")
    p_gen.add_argument("--days", type=int, required=True)
    p_gen.add_argument("--season", choices=["winter", "summer"], required=True)
    p_gen.add_argument("--seed", type=int, required=True)
    p_gen.add_argument("--out", required=True)

    p_run = sub.add_parser("run", help="run a configured experiment")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--eval-greedy", action="store_true",
                       help="add a greedy replay lane for ablation")
    p_run.add_argument("--quiet", action="store_true")

    p_base = sub.add_parser("baseline", help="run a single baseline lane")
    p_base.add_argument("--kind", choices=["default", "prescient"], required=True)
    p_base.add_argument("--building", choices=sorted(PRESETS), required=True)
    p_base.add_argument("--season", choices=["winter", "summer"], required=True)
    p_base.add_argument("--trace", required=True)
    p_base.add_argument("--out", required=True)
    p_base.add_argument("--days", type=int, default=0,
                        help="limit the run (default: whole trace)")

    p_plot = sub.add_parser("plot", help="render SVG charts from result CSVs")
    p_plot.add_argument("--dir", required=True)

    args = parser.parse_args(argv)

    if args.command == "gen-weather":
        save_trace(synthesize_trace(args.days, args.season, args.seed), args.out)
        print(f"wrote {args.out}")
        return 0

    if args.command == "run":
        config = load_config(args.config)
        if args.eval_greedy:
            config = dataclasses.replace(config, eval_greedy=True)
        progress = None if args.quiet else lambda msg: print(msg, file=sys.stderr)
        result = run_experiment(config, progress=progress)
        for name, path in sorted(result.files.items()):
            print(f"{name}: {path}")
        return 0

    if args.command == "baseline":
        from .weather import load_trace

        trace = load_trace(args.trace)
        days = args.days or trace.n_days
        strategy = "default" if args.kind == "default" else "prescient-setback"
        config = ExperimentConfig(days=days, season=args.season, seed=0,
                                  strategy=strategy, building_preset=args.building,
                                  out_dir=args.out, trace_path=args.trace)
        result = run_experiment(config)
        for name, path in sorted(result.files.items()):
            print(f"{name}: {path}")
        return 0

    if args.command == "plot":
        for path in emit_plots(args.dir):
            print(f"wrote {path}")
        return 0

    return 1


if __name__ == "__main__":
    raise SystemExit(main())
