"""Command-line front end: ``simulate``, ``compare`` and ``presets``."""
from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

from .config import PRESETS, ConfigError, RunConfig, parse_config
from .output import comparison_csv, comparison_table, plot_trace, write_atomic, write_trace
from .plant import SimulationError
from .simulate import run, run_comparison


def _load(source: str, stride) -> RunConfig:
    cfg = parse_config(source)
    if stride is not None:
        if stride < 1:
            raise ConfigError("--stride", f"must be >= 1, got {stride}")
        cfg.scenario = dataclasses.replace(cfg.scenario, stride=stride)
    return cfg


def cmd_simulate(cfg: RunConfig, out_dir: str, plot: bool = False) -> list[str]:
    trace = run(cfg.scenario)
    path = os.path.join(out_dir, cfg.csv_name)
    write_trace(trace, path)
    written = [path]
    if plot or cfg.plot:
        written += plot_trace(trace, out_dir, cfg.channels)
    return written


def _mismatch(a: RunConfig, b: RunConfig) -> list[str]:
    diffs = []
    if a.scenario.system != b.scenario.system:
        diffs.append("system")
    for key in ("z0", "z_hat0", "z_tilde0", "theta0"):
        if getattr(a.scenario, key) != getattr(b.scenario, key):
            diffs.append(key)
    return diffs


def cmd_compare(cfgs: list[RunConfig], out_dir: str) -> str:
    if len(cfgs) < 2:
        raise ConfigError("--config", "compare needs at least two configs")
    for other in cfgs[1:]:
        diffs = _mismatch(cfgs[0], other)
        if diffs:
            raise ConfigError(
                "--config",
                f"{other.name} differs from {cfgs[0].name} in: {', '.join(diffs)}",
            )
    results = run_comparison([c.scenario for c in cfgs])
    reports = [rep for _, rep in results]
    table = comparison_table(reports)
    write_atomic(os.path.join(out_dir, "comparison.csv"), comparison_csv(reports))
    write_atomic(os.path.join(out_dir, "comparison.txt"), table)
    return table


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="smobs", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run one scenario and write its trace CSV")
    p_sim.add_argument("--config", required=True, help="JSON file, inline JSON or preset name")
    p_sim.add_argument("--out-dir", default=".")
    p_sim.add_argument("--plot", action="store_true", help="also write SVG plots")
    p_sim.add_argument("--stride", type=int, default=None, help="record every k-th step")

    p_cmp = sub.add_parser("compare", help="tabulate metrics for several variants")
    p_cmp.add_argument("--config", action="append", required=True, help="repeat for each run")
    p_cmp.add_argument("--out-dir", default=".")
    p_cmp.add_argument("--stride", type=int, default=None)

    sub.add_parser("presets", help="list built-in presets with their parameters")

    args = parser.parse_args(argv)
    try:
        if args.command == "presets":
            print(json.dumps(PRESETS, indent=2, sort_keys=True))
            return 0
        if args.command == "simulate":
            for path in cmd_simulate(_load(args.config, args.stride), args.out_dir, args.plot):
                print(path)
            return 0
        cfgs = [_load(c, args.stride) for c in args.config]
        sys.stdout.write(cmd_compare(cfgs, args.out_dir))
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SimulationError as exc:
        print(f"simulation aborted: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
