"""Command-line front end.

    segfactor --start 2 --end 1e6 --output factors
    segfactor bench --interval 10^16-10^9,10^16 --deltas 2^21,2^23 --reps 1
"""
from __future__ import annotations

import argparse
import re
import sys
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Optional

from .bench import run_grid
from .errors import SieveError
from .prime_store import GapCompressedPrimeTable, build_prime_table, limit_for
from .sieve import OutputMode, SieveConfig, Variant, run

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2
_TERM = re.compile(r"[+-]?(?:\d+\^\d+|[\d.]+(?:[eE][+-]?\d+)?)")


class UsageError(Exception):
    pass


def parse_int(text: str) -> int:
    """Parse ``1_000``, ``1e9``, ``2^21`` and sums/differences like ``10^16-10^9``."""
    s = text.replace("_", "").replace(" ", "")
    if not s:
        raise ValueError("empty number")
    terms = _TERM.findall(s)
    if "".join(terms) != s:
        raise ValueError(f"malformed number {text!r}")
    total = 0
    for term in terms:
        sign = -1 if term.startswith("-") else 1
        term = term.lstrip("+-")
        if "^" in term:
            base, _, exp = term.partition("^")
            if not (base.isdigit() and exp.isdigit()):
                raise ValueError(f"malformed number {text!r}")
            value = int(base) ** int(exp)
        else:
            try:
                d = Decimal(term)
            except InvalidOperation:
                raise ValueError(f"malformed number {text!r}") from None
            if not d.is_finite() or d != d.to_integral_value():
                raise ValueError(f"not an integer: {text!r}")
            value = int(d)
        total += sign * value
    return total


def _int_arg(text):
    try:
        return parse_int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _int_list(text):
    return [_int_arg(t) for t in text.split(",") if t]


def _pair(text):
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected two comma-separated integers, got {text!r}")
    return tuple(_int_arg(t) for t in parts)


def _variants(text):
    try:
        return [Variant.parse(t) for t in text.split(",") if t]
    except SieveError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass
class CliArgs:
    start: int
    end: int
    delta: Optional[int] = None
    variant: Variant = Variant.BOTH
    ap: Optional[tuple[int, int]] = None
    output: OutputMode = OutputMode.COUNTS
    out_path: Optional[Path] = None
    save_table: Optional[Path] = None
    load_table: Optional[Path] = None
    threads: int = 1
    verbose: bool = False


@dataclass
class BenchArgs:
    interval: tuple[int, int]
    deltas: list[int]
    variants: list[Variant]
    reps: int = 1
    csv: Optional[Path] = None
    verbose: bool = False


def _factor_parser():
    p = _Parser(prog="segfactor", description="Factor every integer in [start, end).")
    p.add_argument("--start", type=_int_arg, required=True)
    p.add_argument("--end", type=_int_arg, required=True)
    p.add_argument("--delta", type=_int_arg, help="segment length (default: from --end)")
    p.add_argument("--variant", type=lambda s: _variants(s)[0], default=Variant.BOTH,
                   help="plain, pack, gap or both (default both)")
    p.add_argument("--ap", type=_pair, metavar="A,M", help="only n = A (mod M)")
    p.add_argument("--output", choices=[m.value for m in OutputMode], default="counts")
    p.add_argument("--out", dest="out_path", type=Path, help="write here instead of stdout")
    p.add_argument("--save-table", type=Path)
    p.add_argument("--load-table", type=Path)
    p.add_argument("--threads", type=_int_arg, default=1)
    p.add_argument("--verbose", action="store_true", help="print a line per segment to stderr")
    return p


def _bench_parser():
    p = _Parser(prog="segfactor bench", description="Time variants over a delta grid.")
    p.add_argument("--interval", type=_pair, default=(10**16 - 10**9, 10**16), metavar="LO,HI")
    p.add_argument("--deltas", type=_int_list, default=[2**21, 2**23, 2**25, 2**27])
    p.add_argument("--variants", type=_variants, default=list(Variant))
    p.add_argument("--reps", type=_int_arg, default=1)
    p.add_argument("--csv", type=Path)
    p.add_argument("--verbose", action="store_true")
    return p


def parse_args(argv):
    argv = list(argv)
    if argv and argv[0] == "bench":
        ns = _bench_parser().parse_args(argv[1:])
        lo, hi = ns.interval
        if not 2 <= lo < hi:
            raise UsageError(f"--interval: need 2 <= lo < hi, got {lo},{hi}")
        if ns.reps < 1:
            raise UsageError("--reps must be >= 1")
        if any(d < 1 for d in ns.deltas):
            raise UsageError("--deltas must all be >= 1")
        return BenchArgs(ns.interval, ns.deltas, ns.variants, ns.reps, ns.csv, ns.verbose)
    ns = _factor_parser().parse_args(argv)
    if ns.start < 2:
        raise UsageError(f"--start must be >= 2, got {ns.start}")
    if ns.start >= ns.end:
        raise UsageError(f"--start ({ns.start}) must be below --end ({ns.end})")
    if ns.delta is not None and ns.delta < 1:
        raise UsageError("--delta must be >= 1")
    if ns.ap is not None and not (ns.ap[1] >= 1 and 0 <= ns.ap[0] < ns.ap[1]):
        raise UsageError(f"--ap: need 0 <= a < m, got {ns.ap[0]},{ns.ap[1]}")
    if ns.threads < 1:
        raise UsageError("--threads must be >= 1")
    return CliArgs(ns.start, ns.end, ns.delta, ns.variant, ns.ap, OutputMode(ns.output),
                   ns.out_path, ns.save_table, ns.load_table, ns.threads, ns.verbose)


def _load_or_build(args: CliArgs) -> GapCompressedPrimeTable:
    need = limit_for(args.end)
    if args.load_table:
        with open(args.load_table, "rb") as fh:
            table = GapCompressedPrimeTable.load(fh)
        if table.limit < need:
            raise SieveError(f"loaded table stops at {table.limit}, need {need}")
    else:
        table = build_prime_table(need)
    if args.save_table:
        with open(args.save_table, "wb") as fh:
            table.save(fh)
    return table


def _run_factor(args: CliArgs, out, err) -> None:
    config = SieveConfig(args.start, args.end, args.delta, args.variant, args.ap, args.output)
    table = _load_or_build(args)
    sink = None
    if config.output_mode is OutputMode.FACTORS:
        sink = lambda f: out.write(f.format() + "\n")
    elif config.output_mode is OutputMode.CSV:
        out.write("n,p,e\n")
        sink = lambda f: out.writelines(r + "\n" for r in f.csv_rows())
    progress = None
    if args.verbose:
        progress = lambda x1, x2: print(f"segment [{x1}, {x2})", file=err)
    summary = run(config, table, sink=sink, threads=args.threads, progress=progress)
    if config.output_mode is OutputMode.COUNTS:
        out.write(f"primes: {summary.primes_found}\n")
        out.write(f"prime_divisors: {summary.prime_divisors_found}\n")
        out.write(f"distinct_prime_divisors: {summary.distinct_prime_divisors_found}\n")
    delta = min(config.effective_delta, config.hi - config.lo)
    print(f"variant={config.variant.value} delta={delta} segments={summary.segments} "
          f"crossings={summary.crossings}", file=err)
    print(f"slot_bytes={summary.slot_bytes} table_bytes={summary.table_bytes} "
          f"wall_seconds={summary.wall_seconds:.3f}", file=err)


def _run_bench(args: BenchArgs, out, err) -> None:
    log = (lambda msg: print(msg, file=err)) if args.verbose else None
    grid = run_grid(args.interval, args.deltas, args.variants, args.reps, log=log)
    out.write(grid.render_text() + "\n")
    if args.csv:
        args.csv.write_text(grid.render_csv())


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = parse_args(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        print(exc, file=stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        if isinstance(args, BenchArgs):
            _run_bench(args, stdout, stderr)
        elif args.out_path:
            with open(args.out_path, "w") as fh:
                _run_factor(args, fh, stderr)
        else:
            _run_factor(args, stdout, stderr)
    except (SieveError, OSError) as exc:
        print(f"segfactor: {exc}", file=stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
