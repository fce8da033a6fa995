"""Command line entry point for rendering result figures.

Exit codes: 0 success, 2 bad arguments or empty/unknown input, 3 I/O
failure.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .figures import EmptyTableError, FigureSpec, KINDS, default_spec, \
    render, render_all

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="trplot", description="Render figures from experiment CSVs")
    p.add_argument("--csv", help="one CSV file to render")
    p.add_argument("--kind", choices=KINDS,
                   help="figure kind; defaults to the known mapping for the "
                        "file name")
    p.add_argument("--render-all",
                   help="results directory; render every known CSV in it")
    p.add_argument("--out", required=True,
                   help="output PNG path (with --csv) or directory "
                        "(with --render-all)")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if bool(args.csv) == bool(args.render_all):
        print("error: pass exactly one of --csv or --render-all",
              file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.render_all:
            written = render_all(Path(args.render_all), Path(args.out))
        else:
            out = Path(args.out)
            spec = default_spec(Path(args.csv), out.parent)
            spec = FigureSpec(csv_path=spec.csv_path, out_path=out,
                              kind=args.kind or spec.kind, x=spec.x,
                              y=spec.y, group_by=spec.group_by,
                              title=spec.title)
            written = [render(spec)]
    except (EmptyTableError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    for path in written:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
