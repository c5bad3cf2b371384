"""Command-line entry points.

Commands (each takes one configuration file):

  trace              run one trajectory; write trace.csv and pearson.csv
  sweep              evaluate a two-axis grid; write sweep.csv
  compare-strategies run both repack strategies; write trace_/pearson_{keep,erase}.csv
  thermal-scan       rerun the trace for each (T1, T2) pair; write pearson_<k>.csv

Exit codes: 0 success, 1 usage or configuration error, 2 I/O error,
3 numerical drift.  COLLISYNC_WORKERS caps the sweep process count; the
output does not depend on it.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import replace
from typing import Iterable

from .config import ConfigError, RunConfig, SweepConfig, parse_config
from .engine import Strategy, Trajectory, run_trajectory
from .linalg import NumericalDriftError
from .sweep import SweepGrid, run_sweep
from .syncmetrics import PearsonSeries, sliding_pearson

__all__ = ["main", "EXIT_OK", "EXIT_USAGE", "EXIT_IO", "EXIT_DRIFT"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_DRIFT = 3

_TRACE_COLUMNS = ("sx1", "sx2", "sy1", "sy2", "sz1", "sz2", "concurrence", "mutual_info")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; the contract here reserves 2 for I/O
    def error(self, message):
        raise _UsageError(message)


def _fmt(value: float) -> str:
    return "" if math.isnan(value) else f"{value:.17g}"


def _write_lines(path: str, lines: Iterable[str]) -> None:
    with open(path, "w", encoding="ascii", newline="") as fh:
        for line in lines:
            fh.write(line + "\n")


def _trace_lines(traj: Trajectory) -> Iterable[str]:
    yield "N," + ",".join(_TRACE_COLUMNS)
    for rec in traj.records:
        yield f"{rec.n}," + ",".join(_fmt(getattr(rec, col)) for col in _TRACE_COLUMNS)


def _pearson_lines(series: PearsonSeries) -> Iterable[str]:
    yield "window_start,c12"
    for start, value in series:
        yield f"{start},{_fmt(value)}"


def _sweep_lines(grid: SweepGrid) -> Iterable[str]:
    yield "axis1,axis2,c12"
    vals1 = grid.axis1.values()
    vals2 = grid.axis2.values()
    for i in range(grid.axis1.count):
        for j in range(grid.axis2.count):
            yield f"{_fmt(vals1[i])},{_fmt(vals2[j])},{_fmt(grid.values[i, j])}"


def _windowed(cfg: RunConfig, traj: Trajectory) -> PearsonSeries:
    axis = cfg.observable_axis
    return sliding_pearson(traj.series(f"s{axis}1"), traj.series(f"s{axis}2"), cfg.window())


def _run_and_write(cfg: RunConfig, suffix: str = "") -> None:
    traj = run_trajectory(cfg.initial_state(), cfg.model_params(), cfg.n_collisions)
    _write_lines(os.path.join(cfg.output_dir, f"trace{suffix}.csv"), _trace_lines(traj))
    _write_lines(
        os.path.join(cfg.output_dir, f"pearson{suffix}.csv"),
        _pearson_lines(_windowed(cfg, traj)),
    )


def _reject_temp_pairs(cfg: RunConfig, command: str) -> None:
    if cfg.temp_pairs is not None:
        raise ConfigError(f"temp_pairs is only used by thermal-scan, not {command}")


def _require_run(cfg, command: str) -> RunConfig:
    if not isinstance(cfg, RunConfig):
        raise ConfigError(f"{command} takes a run configuration, not a sweep (axis keys present)")
    return cfg


def cmd_trace(cfg: RunConfig) -> None:
    _reject_temp_pairs(cfg, "trace")
    _run_and_write(cfg)


def cmd_compare_strategies(cfg: RunConfig) -> None:
    _reject_temp_pairs(cfg, "compare-strategies")
    for strategy in (Strategy.KEEP, Strategy.ERASE):
        _run_and_write(replace(cfg, strategy=strategy), suffix=f"_{strategy.value}")


def cmd_thermal_scan(cfg: RunConfig) -> None:
    if cfg.temp_pairs is None:
        raise ConfigError("thermal-scan requires the temp_pairs key")
    for k, (t1, t2) in enumerate(cfg.temp_pairs, start=1):
        run_cfg = replace(cfg, temp1=t1, temp2=t2)
        traj = run_trajectory(run_cfg.initial_state(), run_cfg.model_params(), run_cfg.n_collisions)
        _write_lines(
            os.path.join(cfg.output_dir, f"pearson_{k}.csv"),
            _pearson_lines(_windowed(run_cfg, traj)),
        )


def _sweep_workers() -> int | None:
    raw = os.environ.get("COLLISYNC_WORKERS")
    if raw is None:
        return None
    try:
        workers = int(raw)
    except ValueError:
        raise ConfigError(f"COLLISYNC_WORKERS must be an integer, got {raw!r}") from None
    if workers < 1:
        raise ConfigError(f"COLLISYNC_WORKERS must be at least 1, got {workers}")
    return workers


def cmd_sweep(cfg: SweepConfig) -> None:
    grid = run_sweep(cfg.sweep_spec(), workers=_sweep_workers())
    _write_lines(os.path.join(cfg.base.output_dir, "sweep.csv"), _sweep_lines(grid))


def _build_parser() -> _Parser:
    parser = _Parser(prog="collisync", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("trace", "sweep", "compare-strategies", "thermal-scan"):
        cmd = sub.add_parser(name)
        cmd.add_argument("config", help="path to the configuration file")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO

    try:
        cfg = parse_config(text)
        out_dir = cfg.base.output_dir if isinstance(cfg, SweepConfig) else cfg.output_dir
        os.makedirs(out_dir, exist_ok=True)
        if args.command == "sweep":
            if not isinstance(cfg, SweepConfig):
                raise ConfigError("sweep takes a sweep configuration (axis1_*/axis2_* keys)")
            cmd_sweep(cfg)
        elif args.command == "trace":
            cmd_trace(_require_run(cfg, "trace"))
        elif args.command == "compare-strategies":
            cmd_compare_strategies(_require_run(cfg, "compare-strategies"))
        else:
            cmd_thermal_scan(_require_run(cfg, "thermal-scan"))
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalDriftError as exc:
        print(f"numerical drift: {exc}", file=sys.stderr)
        return EXIT_DRIFT
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
