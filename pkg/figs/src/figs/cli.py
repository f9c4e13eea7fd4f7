"""Command line entry point: figs <figure-name> --in DIR --out FILE."""

from __future__ import annotations

import argparse
import sys

from .figures import figure_names, make_spec
from .render import render
from .spec import FigureError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figs",
        description="Render a named figure from a CSV bundle directory.",
    )
    parser.add_argument(
        "figure", help=f"figure name, one of {', '.join(figure_names())}"
    )
    parser.add_argument(
        "--in", dest="in_dir", required=True,
        help="directory holding the bundle's CSV files",
    )
    parser.add_argument(
        "--out", default=None,
        help="output image path; the extension picks the format "
        "(default <figure>.pdf)",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    out = args.out if args.out is not None else f"{args.figure}.pdf"
    try:
        path = render(make_spec(args.figure, args.in_dir, out))
    except FigureError as exc:
        print(f"figs: {exc}", file=sys.stderr)
        return 1
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
