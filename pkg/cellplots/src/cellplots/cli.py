"""Command line wrapper: plot --kind K --in DIR --out FILE."""

import argparse
import os
import sys

from .figures import KIND_INPUTS, KINDS, FigureSpec, PlotInputError, render


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plot",
        description="Render one figure from a lightcell output directory.",
    )
    parser.add_argument("--kind", required=True, choices=KINDS, help="figure kind")
    parser.add_argument(
        "--in", dest="in_dir", required=True, metavar="DIR",
        help="directory holding the run's CSV files",
    )
    parser.add_argument(
        "--out", required=True, metavar="FILE",
        help="image file to write (extension picks the format)",
    )
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if not os.path.isdir(args.in_dir):
        print(f"error: not a directory: {args.in_dir}", file=sys.stderr)
        return 2
    csv_name = KIND_INPUTS[args.kind][0]
    try:
        spec = FigureSpec(
            kind=args.kind,
            inputs=(os.path.join(args.in_dir, csv_name),),
            output=args.out,
        )
        render(spec)
    except PlotInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"{args.kind}: {csv_name} -> {args.out}")
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
