"""Segmented sieve that completely factors every integer in [lo, hi)."""
from __future__ import annotations

import enum
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

import numpy as np

from . import _kernels as K
from .errors import CapacityError, CorruptionError, DomainError, SinkError
from .packed import SLOT_BYTES as PACKED_SLOT_BYTES
from .packed import PackedFactorList
from .prime_store import (
    GapCompressedPrimeTable,
    build_prime_table,
    explicit_size_bits,
    limit_for,
    table_size_bits,
)

PLAIN_SLOT_BYTES = 4 * (K.PLAIN_CELLS + 1)
# n < 2**63 keeps every intermediate inside int64
MAX_HI = 2**63 - 1
MIN_DELTA = 1024


class Variant(enum.Enum):
    PLAIN = "plain"
    PACK = "pack"
    GAP = "gap"
    BOTH = "both"

    @property
    def packed(self) -> bool:
        return self in (Variant.PACK, Variant.BOTH)

    @property
    def gaps(self) -> bool:
        return self in (Variant.GAP, Variant.BOTH)

    @property
    def slot_bytes(self) -> int:
        return PACKED_SLOT_BYTES if self.packed else PLAIN_SLOT_BYTES

    @classmethod
    def parse(cls, value) -> "Variant":
        if isinstance(value, Variant):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise DomainError(f"unknown variant {value!r}") from None


class OutputMode(enum.Enum):
    FACTORS = "factors"
    COUNTS = "counts"
    CSV = "csv"


@dataclass(frozen=True)
class Factorization:
    n: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        prod = 1
        for p, e in self.factors:
            prod *= p**e
        if prod != self.n:
            raise CorruptionError(f"factors {self.factors} do not multiply to {self.n}")

    @property
    def omega(self) -> int:
        return len(self.factors)

    @property
    def big_omega(self) -> int:
        return sum(e for _, e in self.factors)

    @property
    def is_prime(self) -> bool:
        return self.factors == ((self.n, 1),)

    def format(self) -> str:
        terms = " ".join(str(p) if e == 1 else f"{p}^{e}" for p, e in self.factors)
        return f"{self.n}: {terms}".rstrip()

    def csv_rows(self) -> list[str]:
        return [f"{self.n},{p},{e}" for p, e in self.factors]


@dataclass(frozen=True)
class SieveConfig:
    lo: int
    hi: int
    delta: Optional[int] = None
    variant: Variant = Variant.BOTH
    ap_filter: Optional[tuple[int, int]] = None
    output_mode: OutputMode = OutputMode.COUNTS

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant.parse(self.variant))
        object.__setattr__(self, "output_mode", OutputMode(self.output_mode))
        if self.lo < 2:
            raise DomainError(f"lo must be >= 2, got {self.lo}")
        if self.hi <= self.lo:
            raise DomainError(f"empty range [{self.lo}, {self.hi})")
        if self.hi > MAX_HI:
            raise CapacityError(f"hi must be <= {MAX_HI}")
        if self.delta is not None and self.delta < 1:
            raise DomainError(f"delta must be >= 1, got {self.delta}")
        if self.ap_filter is not None:
            a, m = self.ap_filter
            if m < 1 or not 0 <= a < m:
                raise DomainError(f"progression filter needs 0 <= a < m, got {self.ap_filter}")

    @property
    def effective_delta(self) -> int:
        return self.delta if self.delta is not None else default_delta(self.hi)


@dataclass
class RunSummary:
    primes_found: int = 0
    prime_divisors_found: int = 0  # sum of Omega(n), with multiplicity
    distinct_prime_divisors_found: int = 0  # sum of omega(n)
    integers: int = 0
    crossings: int = 0
    segments: int = 0
    slot_bytes: int = 0
    table_bytes: int = 0
    wall_seconds: float = 0.0

    def merge(self, other: "RunSummary") -> None:
        self.primes_found += other.primes_found
        self.prime_divisors_found += other.prime_divisors_found
        self.distinct_prime_divisors_found += other.distinct_prime_divisors_found
        self.integers += other.integers
        self.crossings += other.crossings
        self.segments += other.segments

    def counts(self) -> tuple[int, int, int]:
        return (self.primes_found, self.prime_divisors_found, self.distinct_prime_divisors_found)


def default_delta(hi: int) -> int:
    """Segment length near sqrt(hi) / (ln hi * ln ln hi), at least 1024."""
    if hi < 16:
        return MIN_DELTA
    lg = math.log(hi)
    return max(MIN_DELTA, round(math.sqrt(hi) / (lg * math.log(lg))))


class _PrimeSource:
    """Kernel-ready arguments for iterating the sieving primes of a table."""

    def __init__(self, table: GapCompressedPrimeTable, variant: Variant):
        self.table = table
        self.use_gaps = variant.gaps
        empty = np.zeros(0, dtype=np.int64)
        if self.use_gaps:
            self.primes = empty
            self.half_gaps = table.half_gaps
            self.exc_idx, self.exc_gap = table.exception_arrays
        else:
            self.primes = table.to_array()
            self.half_gaps = np.zeros(0, dtype=np.uint8)
            self.exc_idx = self.exc_gap = empty

    @property
    def table_bytes(self) -> int:
        if self.use_gaps:
            return table_size_bits(self.table) // 8
        return explicit_size_bits(self.table) // 8


class _Buffers:
    def __init__(self, variant: Variant, delta: int, emit: bool):
        self.packed = variant.packed
        if self.packed:
            self.words = np.zeros((delta, 3), dtype=np.uint64)
            self.plain = np.zeros((1, K.PLAIN_CELLS + 1), dtype=np.uint32)
        else:
            self.words = np.zeros((1, 3), dtype=np.uint64)
            self.plain = np.zeros((delta, K.PLAIN_CELLS + 1), dtype=np.uint32)
        rows = delta if emit else 1
        self.out_p = np.zeros((rows, K.PLAIN_CELLS), dtype=np.int64)
        self.out_e = np.zeros((rows, K.PLAIN_CELLS), dtype=np.uint8)
        self.out_k = np.zeros(rows, dtype=np.uint8)


def _check(code: int, where: str) -> None:
    if code == K.ERR_CAPACITY:
        raise CapacityError(f"divisor slot overflow in {where}")
    if code < 0:
        raise CorruptionError(f"inconsistent sieve state in {where}")


def _require_table(table: GapCompressedPrimeTable, x2: int) -> None:
    if table.limit * table.limit < x2 - 1:
        raise DomainError(
            f"table limit {table.limit} too small to sieve below {x2} (need {limit_for(x2)})"
        )


@dataclass
class Segment:
    x1: int
    x2: int
    variant: Variant
    words: np.ndarray = field(repr=False)
    plain: np.ndarray = field(repr=False)
    crossings: int = 0

    def __len__(self) -> int:
        return self.x2 - self.x1

    def slot(self, i: int) -> list[int]:
        """Primes recorded for x1 + i (no 2 in packed variants)."""
        if not 0 <= i < len(self):
            raise IndexError(i)
        if self.variant.packed:
            return list(PackedFactorList.from_bytes(self.words[i].tobytes()))
        k = int(self.plain[i, K.PLAIN_CELLS])
        return [int(p) for p in self.plain[i, :k]]

    def packed_slot(self, i: int) -> PackedFactorList:
        if not self.variant.packed:
            raise DomainError("plain segments have no packed slots")
        return PackedFactorList.from_bytes(self.words[i].tobytes())

    def small_primes(self, i: int) -> list[int]:
        """Distinct primes <= table limit dividing x1 + i, parity restored."""
        primes = self.slot(i)
        if self.variant.packed and (self.x1 + i) % 2 == 0:
            primes.insert(0, 2)
        return primes


def sieve_segment(x1: int, x2: int, table: GapCompressedPrimeTable, variant=Variant.BOTH,
                  delta: Optional[int] = None) -> Segment:
    variant = Variant.parse(variant)
    if not 2 <= x1 < x2:
        raise DomainError(f"segment needs 2 <= x1 < x2, got [{x1}, {x2})")
    if x2 > MAX_HI:
        raise CapacityError(f"x2 must be <= {MAX_HI}")
    if delta is not None and x2 - x1 > delta:
        raise DomainError(f"segment length {x2 - x1} exceeds delta {delta}")
    bufs = _Buffers(variant, x2 - x1, emit=False)
    src = _PrimeSource(table, variant)
    crossings = _sieve(bufs, src, variant, x1, x2 - x1)
    return Segment(x1, x2, variant, bufs.words, bufs.plain, crossings)


def _sieve(bufs: _Buffers, src: _PrimeSource, variant: Variant, x1: int, length: int) -> int:
    code = K.sieve_window(
        x1, length, variant.packed, src.use_gaps, src.table.count, src.primes, src.half_gaps,
        src.exc_idx, src.exc_gap, bufs.packed, bufs.words, bufs.plain,
    )
    _check(code, f"segment [{x1}, {x1 + length})")
    return int(code)


def count_crossings_expected(x1: int, x2: int, table: GapCompressedPrimeTable,
                             skip_two: bool = False) -> int:
    """Exact crossing count for the window: sum over sieving primes p of the
    number of multiples of p in [x1, x2). Packed variants skip p = 2."""
    total = 0
    for p in table:
        if p >= x2:
            break
        if p == 2 and skip_two:
            continue
        total += (x2 - 1) // p - (x1 - 1) // p
    return total


def complete_factorization(n: int, distinct_small_primes, table_limit: int) -> Factorization:
    if n < 1:
        raise DomainError(f"cannot factor {n}")
    if table_limit * table_limit < n:
        raise DomainError(f"table limit {table_limit} too small to factor {n}")
    c = n
    factors = []
    for p in distinct_small_primes:
        e = 0
        while c % p == 0:
            c //= p
            e += 1
        if e == 0:
            raise CorruptionError(f"{p} listed as a divisor of {n} but does not divide it")
        factors.append((p, e))
    if c > 1:
        if c <= table_limit:
            raise CorruptionError(f"{n}: small prime factor {c} missing from divisor list")
        factors.append((c, 1))
    return Factorization(n, tuple(factors))


def _segments(lo: int, hi: int, delta: int) -> Iterator[tuple[int, int]]:
    for x1 in range(lo, hi, delta):
        yield x1, min(x1 + delta, hi)


class _Worker:
    """Sieve-and-complete for one segment with privately owned buffers."""

    def __init__(self, config: SieveConfig, src: _PrimeSource, delta: int, emit: bool):
        self.config = config
        self.src = src
        self.emit = emit
        self.bufs = _Buffers(config.variant, delta, emit)

    def __call__(self, x1: int, x2: int):
        cfg = self.config
        length = x2 - x1
        summary = RunSummary(segments=1)
        summary.crossings = _sieve(self.bufs, self.src, cfg.variant, x1, length)
        a, m = cfg.ap_filter or (0, 1)
        start = (a - x1) % m
        stats = np.zeros(4, dtype=np.int64)
        b = self.bufs
        code = K.complete_window(
            x1, length, self.src.table.limit, b.packed, b.words, b.plain, start, m,
            self.emit, b.out_p, b.out_e, b.out_k, stats,
        )
        _check(code, f"segment [{x1}, {x2})")
        summary.primes_found, summary.prime_divisors_found = int(stats[0]), int(stats[1])
        summary.distinct_prime_divisors_found, summary.integers = int(stats[2]), int(stats[3])
        facts = None
        if self.emit:
            facts = []
            for i in range(start, length, m):
                k = int(b.out_k[i])
                pairs = zip(b.out_p[i, :k].tolist(), b.out_e[i, :k].tolist())
                facts.append(Factorization(x1 + i, tuple(pairs)))
        return summary, facts


def _run_segments(config, src, delta, emit, threads, on_segment):
    segs = _segments(config.lo, config.hi, delta)
    if threads <= 1:
        worker = _Worker(config, src, delta, emit)
        for x1, x2 in segs:
            on_segment(x1, x2, *worker(x1, x2))
        return
    # results are consumed strictly in segment order; at most `threads`
    # segments are in flight, each on a worker whose buffers are idle
    workers = [_Worker(config, src, delta, emit) for _ in range(threads)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        pending = []
        for k, (x1, x2) in enumerate(segs):
            if len(pending) == threads:
                px1, px2, fut = pending.pop(0)
                on_segment(px1, px2, *fut.result())
            pending.append((x1, x2, pool.submit(workers[k % threads], x1, x2)))
        for px1, px2, fut in pending:
            on_segment(px1, px2, *fut.result())


def run(config: SieveConfig, table: Optional[GapCompressedPrimeTable] = None,
        sink: Optional[Callable[[Factorization], None]] = None, threads: int = 1,
        progress: Optional[Callable[[int, int], None]] = None) -> RunSummary:
    """Factor every n in [lo, hi) (optionally n = a mod m), feeding ``sink``
    in increasing order, and return the aggregate counts."""
    if threads < 1:
        raise DomainError("threads must be >= 1")
    if table is None:
        table = build_prime_table(limit_for(config.hi))
    _require_table(table, config.hi)
    delta = min(config.effective_delta, config.hi - config.lo)
    src = _PrimeSource(table, config.variant)
    emit = sink is not None
    total = RunSummary(
        slot_bytes=threads * delta * config.variant.slot_bytes,
        table_bytes=src.table_bytes,
    )
    t0 = time.perf_counter()

    def on_segment(x1, x2, summary, facts):
        if facts is not None:
            for f in facts:
                try:
                    sink(f)
                except Exception as exc:
                    total.wall_seconds = time.perf_counter() - t0
                    raise SinkError(f"sink failed at n={f.n}: {exc}", total) from exc
        total.merge(summary)
        if progress is not None:
            progress(x1, x2)

    _run_segments(config, src, delta, emit, threads, on_segment)
    total.wall_seconds = time.perf_counter() - t0
    return total


def iter_factorizations(config: SieveConfig, table: Optional[GapCompressedPrimeTable] = None
                        ) -> Iterator[Factorization]:
    """Lazily yield factorizations one segment at a time."""
    if table is None:
        table = build_prime_table(limit_for(config.hi))
    _require_table(table, config.hi)
    delta = min(config.effective_delta, config.hi - config.lo)
    worker = _Worker(config, _PrimeSource(table, config.variant), delta, emit=True)
    for x1, x2 in _segments(config.lo, config.hi, delta):
        yield from worker(x1, x2)[1]
