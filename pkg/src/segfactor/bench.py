"""Variant x segment-length timing grid over one interval."""
from __future__ import annotations

import csv
import io
import statistics
from dataclasses import dataclass
from typing import Optional, Sequence

import psutil

from .errors import CorruptionError
from .prime_store import (
    GapCompressedPrimeTable,
    build_prime_table,
    explicit_size_bits,
    limit_for,
    table_size_bits,
)
from .sieve import RunSummary, SieveConfig, Variant, run

REFERENCE_INTERVAL = (10**16 - 10**9, 10**16)
REFERENCE_DELTAS = (2**21, 2**23, 2**25, 2**27)
REFERENCE_COUNTS = (27147369, 3883730055)
# seconds, C++ on an i5-12500T; columns Plain, Pack, Gap, Both
REFERENCE_SECONDS = {
    2**21: (100.7, 91.2, 102.5, 91.9),
    2**23: (92.5, 74.6, 94.1, 75.0),
    2**25: (89.5, 66.0, 88.8, 65.8),
    2**27: (88.8, 61.5, 89.6, 62.5),
}
VARIANT_ORDER = (Variant.PLAIN, Variant.PACK, Variant.GAP, Variant.BOTH)


@dataclass
class BenchResult:
    variant: Variant
    delta: int
    wall_seconds: Optional[float]
    slot_bytes: int
    table_bytes: int
    crossings: int = 0
    counts: Optional[tuple[int, int]] = None
    distinct_divisors: Optional[int] = None
    skipped: Optional[str] = None

    @property
    def total_bits(self) -> int:
        return 8 * (self.slot_bytes + self.table_bytes)


def space_report(variant, delta: int, hi: int,
                 table: Optional[GapCompressedPrimeTable] = None) -> tuple[int, int, int]:
    """Analytic working space ``(slot_bytes, table_bytes, total_bits)``.

    Slots are 24 bytes packed or 68 bytes plain; the prime table is the
    half-gap stream for gap variants and one 64-bit word per prime otherwise.
    """
    variant = Variant.parse(variant)
    if table is None or table.limit < limit_for(hi):
        table = build_prime_table(limit_for(hi))
    slot_bytes = delta * variant.slot_bytes
    bits = table_size_bits(table) if variant.gaps else explicit_size_bits(table)
    table_bytes = -(-bits // 8)
    return slot_bytes, table_bytes, 8 * (slot_bytes + table_bytes)


def _fits(variant: Variant, delta: int, table: GapCompressedPrimeTable, budget: int) -> bool:
    need = delta * variant.slot_bytes
    if not variant.gaps:
        need += explicit_size_bits(table) // 8
    return need <= budget


@dataclass
class BenchGrid:
    interval: tuple[int, int]
    deltas: list[int]
    variants: list[Variant]
    cells: list[BenchResult]

    def cell(self, variant, delta) -> BenchResult:
        variant = Variant.parse(variant)
        for c in self.cells:
            if c.variant is variant and c.delta == delta:
                return c
        raise KeyError((variant, delta))

    def agreed_counts(self) -> Optional[tuple[int, int, int]]:
        seen = {(c.counts, c.distinct_divisors) for c in self.cells if c.skipped is None}
        if len(seen) > 1:
            raise CorruptionError(f"grid cells disagree on counts: {sorted(seen)}")
        if not seen:
            return None
        (counts, distinct), = seen
        return (*counts, distinct)

    def render_text(self, reference: bool = True) -> str:
        lo, hi = self.interval
        head = ["Delta"] + [v.name.title() for v in self.variants]
        rows = []
        for d in self.deltas:
            label = f"2^{d.bit_length() - 1}={d}" if d & (d - 1) == 0 else str(d)
            row = [label]
            for v in self.variants:
                c = self.cell(v, d)
                txt = "skipped" if c.skipped else f"{c.wall_seconds:.1f}"
                if reference and d in REFERENCE_SECONDS and self.interval == REFERENCE_INTERVAL:
                    txt += f" ({REFERENCE_SECONDS[d][VARIANT_ORDER.index(v)]})"
                row.append(txt)
            rows.append(row)
        widths = [max(len(r[i]) for r in [head] + rows) for i in range(len(head))]
        lines = [f"Running times in seconds on [{lo}, {hi})"]
        if reference and self.interval == REFERENCE_INTERVAL:
            lines.append("(published C++ times in parentheses; not comparable across hardware)")
        fmt = lambda r: " | ".join(
            (s.ljust(w) if i == 0 else s.rjust(w)) for i, (s, w) in enumerate(zip(r, widths))
        )
        lines.append(fmt(head))
        lines.append("-+-".join("-" * w for w in widths))
        lines.extend(fmt(r) for r in rows)
        counts = self.agreed_counts()
        if counts is not None:
            lines.append(
                f"primes: {counts[0]}  prime_divisors: {counts[1]}  "
                f"distinct_prime_divisors: {counts[2]}"
            )
        return "\n".join(lines)

    def render_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["variant", "delta", "wall_seconds", "slot_bytes", "table_bytes",
                    "crossings", "primes", "prime_divisors", "distinct_prime_divisors",
                    "skipped"])
        for c in self.cells:
            primes, divisors = c.counts or ("", "")
            w.writerow([c.variant.value, c.delta,
                        "" if c.wall_seconds is None else f"{c.wall_seconds:.3f}",
                        c.slot_bytes, c.table_bytes, c.crossings, primes, divisors,
                        "" if c.distinct_divisors is None else c.distinct_divisors,
                        c.skipped or ""])
        return buf.getvalue()


def run_grid(interval, deltas: Sequence[int], variants: Sequence, repetitions: int = 1,
             table: Optional[GapCompressedPrimeTable] = None,
             memory_budget: Optional[int] = None, log=None) -> BenchGrid:
    """Time every (variant, delta) cell; median wall time over repetitions.

    Cells whose slot array would not fit in ``memory_budget`` bytes (default:
    80% of currently available RAM) are marked skipped.
    """
    lo, hi = interval
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    variants = [Variant.parse(v) for v in variants]
    deltas = list(deltas)
    grid = BenchGrid((lo, hi), deltas, variants, [])
    if not variants or not deltas:
        return grid
    if table is None:
        table = build_prime_table(limit_for(hi))
    for d in deltas:
        for v in variants:
            slot_bytes, table_bytes, _ = space_report(v, d, hi, table)
            cell = BenchResult(v, d, None, slot_bytes, table_bytes)
            grid.cells.append(cell)
            budget = memory_budget
            if budget is None:
                budget = int(0.8 * psutil.virtual_memory().available)
            if not _fits(v, d, table, budget):
                cell.skipped = "insufficient memory"
                if log:
                    log(f"{v.value} delta={d}: skipped ({cell.skipped})")
                continue
            times = []
            summary: Optional[RunSummary] = None
            try:
                for _ in range(repetitions):
                    summary = run(SieveConfig(lo, hi, delta=d, variant=v), table)
                    times.append(summary.wall_seconds)
            except MemoryError:
                cell.skipped = "insufficient memory"
                continue
            cell.wall_seconds = statistics.median(times)
            cell.crossings = summary.crossings
            cell.counts = (summary.primes_found, summary.prime_divisors_found)
            cell.distinct_divisors = summary.distinct_prime_divisors_found
            if log:
                log(f"{v.value} delta={d}: {cell.wall_seconds:.2f}s")
    grid.agreed_counts()
    return grid
