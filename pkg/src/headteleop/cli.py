"""Command-line entry point."""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from .config import ServerConfig, apply_cli_overrides, load_config
from .pipeline import run_headless
from .session import (SessionLogWriter, compute_metrics, metrics_to_csv,
                      read_log)
from .sim import BUILTIN_SCENARIOS, load_scenario, load_scenario_file


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="headteleop",
        description="Head-orientation teleoperation service for a simulated "
                    "mobile manipulator.")
    p.add_argument("--scenario", choices=sorted(BUILTIN_SCENARIOS),
                   help="built-in scenario to load")
    p.add_argument("--scenario-file", help="declarative YAML scene file")
    p.add_argument("--bindings", choices=["day1", "day3", "day6"],
                   help="click-binding preset")
    p.add_argument("--axis", choices=["pitch-yaw", "pitch-roll"],
                   help="head-axis assignment preset")
    p.add_argument("--rate", type=float, help="tick rate in Hz")
    p.add_argument("--log-dir", help="directory for session logs")
    p.add_argument("--listen", metavar="HOST:PORT",
                   help="websocket listen address")
    p.add_argument("--config", metavar="FILE", help="YAML configuration file")
    p.add_argument("--headless", metavar="INPUTFILE",
                   help="run the tick pipeline from a scripted input file "
                        "instead of serving")
    p.add_argument("--headless-log", metavar="OUTFILE",
                   help="with --headless: write the session log here")
    p.add_argument("--metrics-csv", metavar="OUTFILE",
                   help="with --headless: write metrics as CSV here")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = load_config(args.config) if args.config else ServerConfig()
    if args.scenario_file:
        cfg = dataclasses.replace(cfg, scenario_file=args.scenario_file)
    cfg = apply_cli_overrides(cfg, args)

    if args.headless:
        scenario = load_scenario_file(cfg.scenario_file) if cfg.scenario_file \
            else load_scenario(cfg.scenario)
        writer = None
        if args.headless_log:
            writer = SessionLogWriter.open_path(args.headless_log, cfg.digest(),
                                                scenario.name)
        snapshot, _pipeline = run_headless(cfg, args.headless, scenario,
                                           log_writer=writer)
        print(json.dumps(snapshot, indent=2, sort_keys=True))
        if writer is not None:
            writer.close()
            metrics = compute_metrics(read_log(args.headless_log), cfg.rate_hz)
            print(json.dumps(metrics.as_dict(), indent=2, sort_keys=True))
            if args.metrics_csv:
                with open(args.metrics_csv, "w") as f:
                    f.write(metrics_to_csv(metrics))
        return 0

    from .server import serve
    serve(cfg)
    return 0


if __name__ == "__main__":
    sys.exit(main())
