"""Command-line entry point: one figure per invocation."""

import argparse
import sys

from .figures import KIND_COLUMNS, FigureError, FigureSpec, render

EXIT_OK = 0
EXIT_USAGE = 2


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="pacmcts-plots",
        description="Render a figure from a pacmcts sweep CSV.",
    )
    parser.add_argument("--csv", required=True, help="input sweep CSV")
    parser.add_argument(
        "--kind", required=True, choices=sorted(KIND_COLUMNS),
        help="figure kind",
    )
    parser.add_argument(
        "--out", required=True,
        help="output image path; format follows the extension",
    )
    parser.add_argument(
        "--policy", default=None,
        help="restrict to one policy before plotting",
    )
    args = parser.parse_args(argv)
    try:
        info = render(
            FigureSpec(kind=args.kind, csv=args.csv, out=args.out, policy=args.policy)
        )
    except FigureError as exc:
        print(f"figure error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"kind    {info['kind']}")
    print(f"rows    {info['rows']}")
    print(f"series  {info['series']}")
    if "censored" in info:
        print(f"censored {info['censored']}")
    print(f"image   {info['out']}  ({info['width_px']}x{info['height_px']} px)")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
