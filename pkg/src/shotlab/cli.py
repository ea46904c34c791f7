"""Command-line experiment runner.

Subcommands: train, calibrate, sweep-k, compare, gen-graph. Each takes a JSON
config (--config) with flags overriding config fields. Exit codes: 0 success,
1 configuration/validation error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .allocation import PolicyError
from .ansatz import MeasurementError, ObservableError
from .calibration import CalibrationError
from .config import (
    CalibrateConfig,
    ConfigError,
    SweepKConfig,
    TrainConfig,
    load_json_config,
)
from .graphs import GraphError, generate_graph, save_instance
from .report import ReportError
from .runner import cmd_calibrate, cmd_compare, cmd_sweep_k, cmd_train
from .sampling import DistributionError
from .statevector import SimulationError

VALIDATION_ERRORS = (
    ConfigError,
    GraphError,
    PolicyError,
    ObservableError,
    ReportError,
    SimulationError,
    MeasurementError,
    DistributionError,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shotlab",
        description="Benchmark adaptive shot-allocation policies for variational quantum training.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_policy=False, with_noise=False):
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--seed", type=int, default=None, help="override: run only this seed")
        p.add_argument("--out", default=None, help="override: output directory")
        p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
        if with_policy:
            p.add_argument("--policy", default=None, help="override: run only this policy")
        if with_noise:
            p.add_argument("--noise", default=None, help="override: noise preset name or 'none'")

    common(sub.add_parser("train", help="run training per (policy, seed)"),
           with_policy=True, with_noise=True)
    common(sub.add_parser("calibrate", help="entropy vs required-shots sweep"))
    common(sub.add_parser("sweep-k", help="train with the entropy constant k swept"),
           with_noise=True)

    comp = sub.add_parser("compare", help="seed-matched comparison of saved logs")
    comp.add_argument("logs", nargs="+", help="TrainLog JSON files (must include a fixed baseline)")
    comp.add_argument("--out", required=True, help="output directory")
    comp.add_argument("--baseline", default="fixed", help="baseline policy name")

    gen = sub.add_parser("gen-graph", help="generate and save a graph instance file")
    gen.add_argument("--model", required=True, help="pl | ba | ws | sk")
    gen.add_argument("--n-nodes", type=int, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--params", default=None, help="JSON object of model parameters")
    gen.add_argument("--out", required=True, help="output instance file (JSON)")
    return parser


def _overrides(args) -> dict:
    return {
        "seed": getattr(args, "seed", None),
        "out": getattr(args, "out", None),
        "policy": getattr(args, "policy", None),
        "noise": getattr(args, "noise", None),
    }


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    try:
        if args.command == "gen-graph":
            params = json.loads(args.params) if args.params else None
            graph = generate_graph(args.model, args.n_nodes, args.seed, params)
            plan = ("gen-graph", graph, args)
        elif args.command == "train":
            base = Path(args.config).resolve().parent
            cfg = TrainConfig.from_document(load_json_config(args.config), base, _overrides(args))
            plan = ("train", cfg, args)
        elif args.command == "calibrate":
            base = Path(args.config).resolve().parent
            cfg = CalibrateConfig.from_document(load_json_config(args.config), base, _overrides(args))
            plan = ("calibrate", cfg, args)
        elif args.command == "sweep-k":
            base = Path(args.config).resolve().parent
            cfg = SweepKConfig.from_document(load_json_config(args.config), base, _overrides(args))
            plan = ("sweep-k", cfg, args)
        else:  # compare
            missing = [p for p in args.logs if not Path(p).exists()]
            if missing:
                raise ConfigError(f"log files not found: {missing}")
            plan = ("compare", args.logs, args)
        if getattr(args, "jobs", 1) is not None and getattr(args, "jobs", 1) < 1:
            raise ConfigError("--jobs must be >= 1")
    except VALIDATION_ERRORS as exc:
        print(f"shotlab: configuration error: {exc}", file=sys.stderr)
        return 1
    except json.JSONDecodeError as exc:
        print(f"shotlab: configuration error: bad JSON in --params: {exc}", file=sys.stderr)
        return 1

    try:
        command, payload, args = plan
        if command == "gen-graph":
            params = json.loads(args.params) if args.params else None
            save_instance(args.out, payload, args.model, args.seed, params)
            print(f"wrote {args.out}")
        elif command == "train":
            out = cmd_train(payload, jobs=args.jobs)
            print(f"wrote training artifacts to {out}")
        elif command == "calibrate":
            out = cmd_calibrate(payload)
            print(f"wrote calibration artifacts to {out}")
        elif command == "sweep-k":
            out = cmd_sweep_k(payload, jobs=args.jobs)
            print(f"wrote k-sweep artifacts to {out}")
        else:
            out = cmd_compare([Path(p) for p in payload], Path(args.out), baseline=args.baseline)
            print(f"wrote comparison to {out}")
    except VALIDATION_ERRORS as exc:
        # Late validation (e.g. mismatched seeds discovered while comparing).
        print(f"shotlab: validation error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"shotlab: runtime failure: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
