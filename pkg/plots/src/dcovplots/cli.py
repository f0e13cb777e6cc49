"""`render` script: turn an experiment CSV into a figure image.

Usage: render --input fig1.csv --kind boxplot_grid --out fig1.png
"""

from __future__ import annotations

import argparse
import sys

from .render import KINDS, PlotJob, render


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="render",
                                     description="Render experiment CSVs to figures.")
    parser.add_argument("--input", required=True, help="experiment result CSV")
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--facet", default="family",
                        help="comma-separated facet columns (default: family)")
    parser.add_argument("--x", default="n", dest="x_column",
                        help="column giving the x-axis groups (default: n)")
    return parser


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    job = PlotJob(input_csv=args.input, kind=args.kind, output=args.out,
                  facet_by=tuple(args.facet.split(",")), x_column=args.x_column)
    try:
        spec = render(job)
    except Exception as exc:
        print(f"render: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {args.out}: {len(spec.facets)} facet(s)")
    return 0


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
