"""Command-line entry: figure kind, input path(s), output path.

Exit codes mirror the simulator CLI: 0 success, 1 bad arguments or
schema mismatch, 2 unexpected runtime failure.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional

from .figspec import KINDS, FigureSpec
from .render import render
from .schema import SchemaError


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise SchemaError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="cryptofigs", description=__doc__)
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("inputs", nargs="+",
                        help="input CSV file(s); compare_bars takes two")
    parser.add_argument("--output", "-o", required=True,
                        help="image path; format follows the extension")
    parser.add_argument("--dpi", type=int, default=150)
    parser.add_argument("--labels", nargs=2, default=("heterogeneous",
                                                      "representative"),
                        metavar=("FIRST", "SECOND"),
                        help="series names for compare_bars")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        spec = FigureSpec(
            kind=args.kind,
            inputs=tuple(args.inputs),
            output=args.output,
            dpi=args.dpi,
            labels=tuple(args.labels),
        )
        out = render(spec)
    except (SchemaError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
