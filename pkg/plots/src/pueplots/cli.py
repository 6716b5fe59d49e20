"""Command-line front end: render one figure from experiment CSVs."""

from __future__ import annotations

import argparse
import sys

from .render import KINDS, PlotSpec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pueplots")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one figure from CSV inputs")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--in", dest="inputs", nargs="+", required=True,
                   metavar="CSV")
    p.add_argument("--labels", nargs="+", required=True)
    p.add_argument("--out", required=True, help="output image path")
    p.add_argument("--linear-x", action="store_true",
                   help="linear instead of logarithmic time axis")
    p.add_argument("--log-y", action="store_true")
    return parser


def cli_main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    spec = PlotSpec(kind=args.kind, inputs=args.inputs, labels=args.labels,
                    output_path=args.out, log_x=not args.linear_x,
                    log_y=args.log_y)
    try:
        summary = render(spec)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {summary.output_path} "
          f"({summary.series_count} series: {', '.join(summary.labels)})")
    return 0


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
