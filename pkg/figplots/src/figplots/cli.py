"""figplots command line: one CSV in, one PNG out."""

from __future__ import annotations

import argparse
import sys

from .core import KINDS, FigplotsError, PlotJob, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figplots",
        description="Render omm-qcorr sweep CSVs as heatmaps, line cuts or "
                    "categorical region maps. NaN cells (unstable points) "
                    "render blank.")
    parser.add_argument("--input", required=True, help="input CSV path")
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--x", required=True, help="x-axis column")
    parser.add_argument("--y", default=None,
                        help="y-axis column (grid kinds) or comma-separated "
                             "measure columns (lines)")
    parser.add_argument("--z", default=None,
                        help="value column (heatmap) or code column (regionmap)")
    parser.add_argument("--out", required=True, help="output PNG path")
    parser.add_argument("--title", default=None)
    parser.add_argument("--xlabel", default=None)
    parser.add_argument("--ylabel", default=None)
    parser.add_argument("--dpi", type=int, default=150)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    job = PlotJob(input_csv=args.input, kind=args.kind, x=args.x, y=args.y,
                  z=args.z, out=args.out, title=args.title,
                  xlabel=args.xlabel, ylabel=args.ylabel, dpi=args.dpi)
    try:
        render(job)
    except FigplotsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
