"""Command line entry point: ``qobsnet {synthesize,simulate,verify}``.

Exit codes: 0 success, 1 parse or validation error, 2 synthesis failure,
3 verification failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .config import ExperimentConfig, load_config
from .errors import ConfigError, GraphError, SynthesisError
from .runner import run_simulate, run_synthesize, run_verify

EXIT_OK, EXIT_CONFIG, EXIT_SYNTHESIS, EXIT_VERIFY = 0, 1, 2, 3


def _horizons(text: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad horizon list {text!r}") from exc
    if not values or any(v <= 0 for v in values):
        raise argparse.ArgumentTypeError("horizons must be positive numbers")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qobsnet", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in [
        ("synthesize", "build the observer network and print its matrices"),
        ("simulate", "write coefficient traces and running averages"),
        ("verify", "run every invariant check"),
    ]:
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", help="config path, or 'example_sec4' for the bundled one",
                       required=name != "verify")
        p.add_argument("--out", type=Path, help="output directory (created if absent)")
        p.add_argument("--seed", type=int, help="seed for random graphs and sampled checks")
        p.add_argument("--t-max", type=float, dest="t_max")
        p.add_argument("--step", type=float)
        p.add_argument("--horizons", type=_horizons, help="comma separated averaging horizons")
        if name == "verify":
            p.add_argument("--count", type=int, default=50,
                           help="number of random graphs when no config is given")
    return parser


def _apply_overrides(cfg: ExperimentConfig, args) -> ExperimentConfig:
    cfg = replace(cfg)
    if args.t_max is not None:
        cfg.t_max = args.t_max
    if args.step is not None:
        cfg.step = args.step
    if args.horizons is not None:
        cfg.horizons = args.horizons
    if args.seed is not None and cfg.graph is not None and cfg.graph.generator == "random-connected":
        cfg.graph = replace(cfg.graph, seed=args.seed)
    if cfg.t_max <= 0 or not 0 < cfg.step <= cfg.t_max:
        raise ConfigError(f"need t_max > 0 and 0 < step <= t_max, got {cfg.t_max}, {cfg.step}")
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _apply_overrides(load_config(args.config), args) if args.config else None
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if args.command == "synthesize":
            report = run_synthesize(cfg)
            text = json.dumps(report, indent=1)
            if args.out:
                args.out.mkdir(parents=True, exist_ok=True)
                (args.out / "realization.json").write_text(text, encoding="utf-8")
            print(text)
            return EXIT_OK

        if args.command == "simulate":
            archive = run_simulate(cfg, args.out)
            print(json.dumps(archive.report, indent=1, sort_keys=True))
            return EXIT_OK

        seed = 42 if args.seed is None else args.seed
        if cfg is None:
            verify_kwargs = {}
            if args.t_max is not None:
                verify_kwargs["t_max"] = args.t_max
            if args.step is not None:
                verify_kwargs["step"] = args.step
            report = run_verify(None, seed=seed, count=args.count, **verify_kwargs)
        else:
            report = run_verify(cfg, seed=seed)
        print(report.text())
        if args.out:
            args.out.mkdir(parents=True, exist_ok=True)
            (args.out / "verify.json").write_text(json.dumps(report.to_dict(), indent=1),
                                                  encoding="utf-8")
        return EXIT_OK if report.passed else EXIT_VERIFY
    except (GraphError, SynthesisError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SYNTHESIS
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
