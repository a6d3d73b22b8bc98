"""Table of the primes up to a bound, stored as half-gaps in byte cells.

Only the primes after 3 are stored. Each cell holds half the distance to
the previous prime. A cell value of 0 means the gap did not fit in a byte;
the full gap is then looked up in a side list of ``(cell_index, gap)``.
"""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from typing import BinaryIO, Iterator

import numpy as np

from .errors import CorruptionError, DomainError

MAGIC = b"GPT1"
CELL_MAX = 255
# one exception entry = 64-bit cell index + 64-bit full gap
EXCEPTION_BITS = 128


def simple_sieve(limit: int) -> np.ndarray:
    """All primes <= limit as an int64 array (odd-only bitset sieve)."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    # odd[i] stands for 2*i + 1
    odd = np.ones(limit // 2 + 1, dtype=bool)
    odd[0] = False
    if 2 * (len(odd) - 1) + 1 > limit:
        odd = odd[:-1]
    for i in range(1, (math.isqrt(limit) - 1) // 2 + 1):
        if odd[i]:
            p = 2 * i + 1
            odd[p * p // 2 :: p] = False
    primes = 2 * np.flatnonzero(odd).astype(np.int64) + 1
    return np.concatenate([np.array([2], dtype=np.int64), primes])


@dataclass(frozen=True, eq=False)
class GapCompressedPrimeTable:
    limit: int
    half_gaps: np.ndarray  # uint8
    exceptions: tuple[tuple[int, int], ...] = ()
    count: int = 0
    _exc_arrays: tuple = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        idx = np.array([i for i, _ in self.exceptions], dtype=np.int64)
        gap = np.array([g for _, g in self.exceptions], dtype=np.int64)
        object.__setattr__(self, "_exc_arrays", (idx, gap))

    def __iter__(self) -> Iterator[int]:
        return prime_iterator(self)

    def __len__(self) -> int:
        return self.count

    @property
    def exception_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """``(cell_index, full_gap)`` as int64 arrays, for the jitted kernels."""
        return self._exc_arrays

    def to_array(self) -> np.ndarray:
        """Decode the whole table into an explicit int64 prime array."""
        if self.count <= 2:
            return np.array([2, 3][: self.count], dtype=np.int64)
        steps = 2 * self.half_gaps.astype(np.int64)
        for i, gap in self.exceptions:
            if self.half_gaps[i] != 0:
                raise CorruptionError(f"exception at cell {i} but cell is not a sentinel")
            steps[i] = gap
        sentinels = np.flatnonzero(self.half_gaps == 0)
        if len(sentinels) != len(self.exceptions) or np.any(
            sentinels != self.exception_arrays[0]
        ):
            raise CorruptionError("sentinel cells and exception list disagree")
        return np.concatenate([[2, 3], 3 + np.cumsum(steps)]).astype(np.int64)

    def __eq__(self, other):
        if not isinstance(other, GapCompressedPrimeTable):
            return NotImplemented
        return (
            self.limit == other.limit
            and self.count == other.count
            and self.exceptions == other.exceptions
            and np.array_equal(self.half_gaps, other.half_gaps)
        )

    def save(self, fh: BinaryIO) -> None:
        fh.write(MAGIC)
        fh.write(struct.pack("<QQ", self.limit, self.count))
        fh.write(self.half_gaps.astype(np.uint8).tobytes())
        fh.write(struct.pack("<I", len(self.exceptions)))
        for i, gap in self.exceptions:
            fh.write(struct.pack("<QQ", i, gap))

    @classmethod
    def load(cls, fh: BinaryIO) -> "GapCompressedPrimeTable":
        if fh.read(4) != MAGIC:
            raise CorruptionError("not a prime table dump (bad magic)")
        limit, count = struct.unpack("<QQ", _read_exact(fh, 16))
        ncells = max(count - 2, 0)
        half_gaps = np.frombuffer(_read_exact(fh, ncells), dtype=np.uint8).copy()
        (nexc,) = struct.unpack("<I", _read_exact(fh, 4))
        exceptions = tuple(
            struct.unpack("<QQ", _read_exact(fh, 16)) for _ in range(nexc)
        )
        return from_parts(limit, half_gaps, exceptions, count)


def _read_exact(fh: BinaryIO, n: int) -> bytes:
    data = fh.read(n)
    if len(data) != n:
        raise CorruptionError("truncated prime table dump")
    return data


def from_parts(limit, half_gaps, exceptions=(), count=None) -> GapCompressedPrimeTable:
    """Assemble a table from raw cells without re-validating primality."""
    half_gaps = np.asarray(half_gaps, dtype=np.uint8)
    if count is None:
        count = len(half_gaps) + 2
    exceptions = tuple(sorted((int(i), int(g)) for i, g in exceptions))
    return GapCompressedPrimeTable(limit, half_gaps, exceptions, count)


def build_prime_table(limit: int) -> GapCompressedPrimeTable:
    if limit < 2:
        raise DomainError(f"prime table limit must be >= 2, got {limit}")
    primes = simple_sieve(limit)
    if len(primes) <= 2:
        return GapCompressedPrimeTable(limit, np.zeros(0, dtype=np.uint8), (), len(primes))
    halves = np.diff(primes[1:]) // 2
    big = np.flatnonzero(halves > CELL_MAX)
    exceptions = tuple((int(i), int(2 * halves[i])) for i in big)
    halves[big] = 0
    return GapCompressedPrimeTable(limit, halves.astype(np.uint8), exceptions, len(primes))


def prime_iterator(table: GapCompressedPrimeTable) -> Iterator[int]:
    """Yield the table's primes in increasing order.

    Decodes cells as stored; values reached through the exception list are
    not checked for primality.
    """
    if table.count >= 1:
        yield 2
    if table.count >= 2:
        yield 3
    p = 3
    exc = iter(table.exceptions)
    for i, h in enumerate(table.half_gaps.tolist()):
        if h:
            p += 2 * h
        else:
            idx, gap = next(exc, (None, None))
            if idx != i:
                raise CorruptionError(f"sentinel at cell {i} has no matching exception")
            p += gap
        yield p


def table_size_bits(table: GapCompressedPrimeTable) -> int:
    return 8 * len(table.half_gaps) + EXCEPTION_BITS * len(table.exceptions)


def explicit_size_bits(table: GapCompressedPrimeTable) -> int:
    """Bits for the same primes held as one 64-bit word each."""
    return 64 * table.count


def limit_for(hi: int) -> int:
    """Smallest table limit that sieves every integer below ``hi``."""
    r = math.isqrt(hi - 1)
    return max(2, r if r * r == hi - 1 else r + 1)
