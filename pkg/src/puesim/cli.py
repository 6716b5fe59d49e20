"""Command-line front end: run, sweep, bounds, validate."""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

import numpy as np

from . import harness, metrics
from .harness import generate_pu_model, load_config


def _add_overrides(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, help="override base_seed")
    parser.add_argument("--runs", type=int, help="override run count")
    parser.add_argument("--out", help="override output path")
    parser.add_argument("--threads", type=int, help="override worker count")


def _apply_overrides(config, args):
    if args.seed is not None:
        config = replace(config, base_seed=args.seed)
    if args.runs is not None:
        config = replace(config, runs=args.runs)
    if args.out is not None:
        config = replace(config, output_path=args.out)
    if args.threads is not None:
        config = replace(config, threads=args.threads)
    return config


def _suffixed(path: str, tag: str) -> str:
    root, ext = os.path.splitext(path)
    return f"{root}_{tag}{ext or '.csv'}"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="puesim")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one experiment config")
    p_run.add_argument("config")
    _add_overrides(p_run)

    p_sweep = sub.add_parser("sweep", help="repeat an experiment over K or m")
    p_sweep.add_argument("config")
    p_sweep.add_argument("--param", choices=("K", "m"), required=True)
    p_sweep.add_argument("--values", required=True,
                         help="comma-separated parameter values")
    _add_overrides(p_sweep)

    p_bounds = sub.add_parser("bounds", help="print analytical bound values")
    p_bounds.add_argument("--algo", choices=("pola", "prola"), required=True)
    p_bounds.add_argument("--K", type=int, required=True)
    p_bounds.add_argument("--T", type=int, required=True)
    p_bounds.add_argument("--m", type=int, default=1)

    p_val = sub.add_parser("validate", help="check a config without running")
    p_val.add_argument("config")
    return parser


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0

    try:
        if args.command == "bounds":
            if args.algo == "pola":
                value = metrics.pola_upper_bound(args.K, args.T)
            else:
                value = metrics.prola_upper_bound(args.K, args.T, args.m)
            print(f"{args.algo} upper bound (K={args.K}, T={args.T}"
                  f"{', m=%d' % args.m if args.algo == 'prola' else ''}): {value:.6g}")
            return 0

        config = load_config(args.config)
        if args.command == "validate":
            config.validate()
            print(f"{args.config}: OK")
            return 0

        config = _apply_overrides(config, args)
        if args.command == "run":
            result = harness.run_experiment(config)
            harness.write_csv(result, config.output_path)
            print(f"wrote {config.output_path} "
                  f"({config.runs} runs, final mean regret "
                  f"{result.mean_regret[-1]:.4g})")
            return 0

        # sweep
        values = [int(v) for v in args.values.split(",") if v.strip()]
        if not values:
            raise ValueError("--values must list at least one integer")
        for value in values:
            cfg = config
            if args.param == "K":
                pu = generate_pu_model(config.pu.kind, value, config.pu_seed)
                cfg = replace(config, n_channels=value, pu=pu)
            else:
                cfg = replace(config, m=value)
            out = _suffixed(config.output_path, f"{args.param}{value}")
            cfg = replace(cfg, output_path=out)
            result = harness.run_experiment(cfg)
            harness.write_csv(result, out)
            print(f"wrote {out} (final mean regret {result.mean_regret[-1]:.4g})")
        return 0
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
