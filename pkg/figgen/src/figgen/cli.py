"""figgen command line: result CSV -> log-log figure."""

from __future__ import annotations

import argparse
import sys

from .render import EmptyInputError, FigureSpec, SchemaError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="figgen", description="Render solver result CSVs as log-log figures"
    )
    parser.add_argument("--kind", required=True, choices=("convergence", "viscosity"))
    parser.add_argument("--in", dest="input_csv", required=True, metavar="CSV")
    parser.add_argument("--out", dest="output_path", required=True, metavar="IMG")
    parser.add_argument(
        "--no-reference-slope",
        action="store_true",
        help="omit the dashed slope-1 guide line",
    )
    args = parser.parse_args(argv)
    try:
        spec = FigureSpec(
            input_csv=args.input_csv,
            kind=args.kind,
            output_path=args.output_path,
            reference_slope=not args.no_reference_slope,
        )
        out = render(spec)
    except (SchemaError, EmptyInputError) as exc:
        print(f"figgen: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
