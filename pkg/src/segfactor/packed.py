"""Distinct odd prime divisors of one integer, bit-packed into a 64-bit word.

Each prime ``p`` is stored as ``p >> 1`` (its always-set low bit dropped),
appended above the previous entry. ``ptr[k]`` records the exclusive end
bit of entry ``k``, so any entry can be cut out with one shift and one mask.

The in-memory slot layout shared with the sieve kernels is three
little-endian 64-bit words: word 0 is ``list``, bytes 8..22 are ``ptr[0..14]``
and byte 23 is ``plen``.
"""
from __future__ import annotations

import struct

from .errors import CapacityError, DomainError

CAPACITY = 15
WORD_BITS = 64
SLOT_BYTES = 24
_SLOT = struct.Struct("<Q15sB")


class PackedFactorList:
    __slots__ = ("list", "ptr", "plen")

    def __init__(self):
        self.list = 0
        self.ptr = bytearray(CAPACITY)
        self.plen = 0

    def clear(self) -> "PackedFactorList":
        self.list = 0
        self.ptr[:] = bytes(CAPACITY)
        self.plen = 0
        return self

    def add_prime(self, p: int) -> "PackedFactorList":
        if p < 3 or not p & 1:
            raise DomainError(f"only odd primes >= 3 can be packed, got {p}")
        pos = self.plen
        if pos >= CAPACITY:
            raise CapacityError(f"packed list already holds {CAPACITY} primes")
        left = self.ptr[pos - 1] if pos > 0 else 0
        if pos > 0 and p <= self.get_prime(pos - 1):
            raise DomainError(f"primes must be appended in increasing order ({p})")
        pbits = p >> 1
        end = left + pbits.bit_length()
        if end > WORD_BITS:
            raise CapacityError(f"adding {p} needs {end} bits, word holds {WORD_BITS}")
        self.list |= pbits << left
        self.ptr[pos] = end
        self.plen = pos + 1
        return self

    def get_prime(self, pos: int) -> int:
        if not 0 <= pos < self.plen:
            raise IndexError(f"position {pos} out of range for {self.plen} primes")
        left = self.ptr[pos - 1] if pos > 0 else 0
        copy = self.list >> left
        copy &= (1 << (self.ptr[pos] - left)) - 1
        return (copy << 1) | 1

    def __len__(self) -> int:
        return self.plen

    def __iter__(self):
        for pos in range(self.plen):
            yield self.get_prime(pos)

    def __repr__(self):
        return f"PackedFactorList({list(self)!r})"

    def __eq__(self, other):
        if not isinstance(other, PackedFactorList):
            return NotImplemented
        return (self.list, bytes(self.ptr), self.plen) == (other.list, bytes(other.ptr), other.plen)

    @property
    def bits_used(self) -> int:
        return self.ptr[self.plen - 1] if self.plen else 0

    def to_bytes(self) -> bytes:
        return _SLOT.pack(self.list, bytes(self.ptr), self.plen)

    def to_words(self) -> tuple[int, int, int]:
        return struct.unpack("<3Q", self.to_bytes())

    @classmethod
    def from_bytes(cls, raw) -> "PackedFactorList":
        obj = cls()
        obj.list, ptr, obj.plen = _SLOT.unpack(bytes(raw))
        obj.ptr[:] = ptr
        return obj

    @classmethod
    def from_primes(cls, primes) -> "PackedFactorList":
        obj = cls()
        for p in primes:
            obj.add_prime(p)
        return obj


def clear(lst: PackedFactorList) -> PackedFactorList:
    return lst.clear()


def add_prime(lst: PackedFactorList, p: int) -> PackedFactorList:
    return lst.add_prime(p)


def get_prime(lst: PackedFactorList, pos: int) -> int:
    return lst.get_prime(pos)


def length(lst: PackedFactorList) -> int:
    return len(lst)
