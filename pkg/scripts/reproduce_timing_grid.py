#!/usr/bin/env python3
"""Time the four variants over the segment-length grid and print a Table-1 style grid.

Defaults reproduce the published setup (about an hour on one core). For a
quick look:  python scripts/reproduce_timing_grid.py --interval 2,10^8 --deltas 2^14,2^17
"""
import argparse
import sys
from pathlib import Path

from segfactor.bench import REFERENCE_DELTAS, REFERENCE_INTERVAL, run_grid
from segfactor.cli import parse_int
from segfactor.sieve import Variant


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--interval", default=None, help="lo,hi (default: the published interval)")
    ap.add_argument("--deltas", default=",".join(f"2^{d.bit_length() - 1}" for d in REFERENCE_DELTAS))
    ap.add_argument("--variants", default="plain,pack,gap,both")
    ap.add_argument("--reps", type=int, default=1)
    ap.add_argument("--csv", type=Path)
    args = ap.parse_args()

    interval = REFERENCE_INTERVAL
    if args.interval:
        interval = tuple(parse_int(t) for t in args.interval.split(","))
    deltas = [parse_int(t) for t in args.deltas.split(",")]
    variants = [Variant.parse(v) for v in args.variants.split(",")]
    grid = run_grid(interval, deltas, variants, args.reps,
                    log=lambda msg: print(msg, file=sys.stderr, flush=True))
    print(grid.render_text())
    if args.csv:
        args.csv.write_text(grid.render_csv())


if __name__ == "__main__":
    main()
