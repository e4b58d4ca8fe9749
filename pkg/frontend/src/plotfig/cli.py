"""Command line: `plotfig render --spec figure.json`.

Exit codes: 0 success, 2 bad spec or schema mismatch.
"""

from __future__ import annotations

import argparse
import sys

from .errors import SpecError
from .figures import render
from .spec import FigureSpec


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plotfig", description="Render figures from simulator CSV outputs"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one figure from a spec JSON")
    p.add_argument("--spec", required=True, help="figure spec JSON path")
    p.add_argument("--out", default=None, help="override the output image path")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = FigureSpec.load(args.spec)
        if args.out is not None:
            spec = FigureSpec(kind=spec.kind, inputs=spec.inputs, out=args.out,
                              graph=spec.graph, style=spec.style)
        path = render(spec)
        print(path)
        return 0
    except (SpecError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
