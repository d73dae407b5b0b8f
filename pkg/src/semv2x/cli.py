"""Command-line front end: single runs, sweeps, and scenario validation.

Outputs are CSV with fixed 6-digit precision and no locale dependence, so
repeated identical invocations (and serial vs parallel sweeps) produce
byte-identical files.

Exit codes: 0 ok, 2 validation error, 3 collision fault, 4 partial sweep
failure.
"""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

from .engine import MetricsRecord, SweepResult, run, sweep
from .errors import CollisionError, ScenarioError, SimulationError
from .policy import MODES
from .scenario import parse_scenario

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_COLLISION = 3
EXIT_PARTIAL = 4


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def _parse_locations(text: str) -> list[int]:
    locations: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            locations.extend(range(int(lo), int(hi) + 1))
        elif part:
            locations.append(int(part))
    if not locations or any(not 1 <= n <= 6 for n in locations):
        raise ScenarioError(f"--locations must name labels in 1..6 (got {text!r})")
    return locations


def _parse_rates(text: str) -> list[float]:
    try:
        rates = [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise ScenarioError(f"--rates must be a comma-separated list of numbers "
                            f"(got {text!r})") from None
    if not rates or any(r <= 0 for r in rates):
        raise ScenarioError(f"--rates entries must be positive (got {text!r})")
    return rates


def _write_run_outputs(out_dir: str, record: MetricsRecord) -> None:
    os.makedirs(out_dir, exist_ok=True)
    ticks_path = os.path.join(out_dir, "ticks.csv")
    with open(ticks_path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("time_s,mean_speed_mps,cautioned,active\n")
        for row in record.ticks:
            fh.write(f"{_fmt(row.time_s)},{_fmt(row.mean_speed_mps)},"
                     f"{row.cautioned},{row.active}\n")
    summary_path = os.path.join(out_dir, "summary.csv")
    with open(summary_path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("weighted_mean_speed_mps,caution_activations,completed,collision\n")
        fh.write(f"{_fmt(record.weighted_mean_speed_mps)},{record.caution_activations},"
                 f"{record.completed_trips},{int(record.collision)}\n")


def _write_sweep_outputs(out_dir: str, result: SweepResult) -> list[str]:
    """Write gap_grid.csv (and failures.csv when needed); returns failures."""
    os.makedirs(out_dir, exist_ok=True)
    failures: list[str] = []
    grid_path = os.path.join(out_dir, "gap_grid.csv")
    with open(grid_path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("scenario_kind,rsu_location,spawn_rate,speed_gap_mps,stddev_mps,replicates\n")
        for loc in result.locations:
            for rate in result.spawn_rates:
                cell = result.cells[(loc, rate)]
                if cell.error is not None:
                    failures.append(f"{loc},{_fmt(rate)},{cell.error}")
                    continue
                fh.write(f"{result.scenario_kind},{loc},{_fmt(rate)},"
                         f"{_fmt(cell.mean_gap)},{_fmt(cell.stddev)},{cell.replicates}\n")
    if failures:
        with open(os.path.join(out_dir, "failures.csv"), "w", encoding="ascii",
                  newline="\n") as fh:
            fh.write("rsu_location,spawn_rate,error\n")
            for line in failures:
                fh.write(line + "\n")
    return failures


def cmd_run(args: argparse.Namespace) -> int:
    try:
        cfg = parse_scenario(args.scenario)
        if args.seed is not None:
            cfg = replace(cfg, seed=args.seed)
        if args.mode is not None:
            cfg = replace(cfg, mode=args.mode)
        cfg.validate()
        record = run(cfg)
    except CollisionError as exc:
        print(f"collision fault: {exc}", file=sys.stderr)
        return EXIT_COLLISION
    except SimulationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    _write_run_outputs(args.out, record)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    try:
        cfg = parse_scenario(args.scenario)
        if args.seed is not None:
            cfg = replace(cfg, seed=args.seed)
        cfg.validate()
        locations = _parse_locations(args.locations)
        rates = _parse_rates(args.rates) if args.rates else [cfg.spawn_rate]
        seeds = [cfg.seed + i for i in range(args.seeds)]
        result = sweep(cfg, locations, rates, seeds, parallel=args.parallel)
    except SimulationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    failures = _write_sweep_outputs(args.out, result)
    if failures:
        print(f"{len(failures)} sweep cell(s) failed; see failures.csv", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        cfg = parse_scenario(args.scenario)
    except SimulationError as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    print(f"ok: {cfg.scenario_kind} scenario, mode {cfg.mode}, "
          f"RSU location {cfg.rsu.location_label}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semv2x",
        description="Microscopic traffic simulator comparing context-free and "
                    "relevance-filtered V2X hazard warnings.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario and write ticks.csv/summary.csv")
    p_run.add_argument("--scenario", required=True, help="scenario file path")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    p_run.add_argument("--mode", choices=MODES, default=None, help="override the reaction mode")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="speed-gap grid over RSU location and density")
    p_sweep.add_argument("--scenario", required=True, help="scenario file path")
    p_sweep.add_argument("--out", required=True, help="output directory")
    p_sweep.add_argument("--seed", type=int, default=None, help="base seed (replicates use seed+i)")
    p_sweep.add_argument("--seeds", type=int, default=5, help="replicate seeds per cell")
    p_sweep.add_argument("--locations", default="1-6", help="RSU labels, e.g. 1-6 or 1,3,5")
    p_sweep.add_argument("--rates", default=None, help="spawn rates (veh/s/lane), e.g. 0.03,0.08")
    p_sweep.add_argument("--parallel", type=int, default=1, help="worker processes for cells")
    p_sweep.set_defaults(func=cmd_sweep)

    p_val = sub.add_parser("validate", help="parse and validate a scenario file")
    p_val.add_argument("--scenario", required=True, help="scenario file path")
    p_val.set_defaults(func=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
