"""Jitted inner loops for one segment: crossing-off and factor completion.

Packed slots are ``uint64[Δ, 3]`` rows in the ``PackedFactorList`` layout
(word 0 = list, bytes 8..22 = ptr, byte 23 = plen). Plain slots are
``uint32[Δ, 17]`` rows: 16 prime cells then the length.

Kernels report failures through negative return codes instead of raising,
so they can run with the GIL released.
"""
import numpy as np
from numba import njit

ERR_CAPACITY = -1
ERR_CORRUPT = -2

PLAIN_CELLS = 16
PACKED_CAPACITY = 15
_U8 = np.uint64(0xFF)
_PLEN_SHIFT = np.uint64(56)
_LOW56 = np.uint64((1 << 56) - 1)


@njit(inline="always")
def _ptr(row, k):
    return (row[1 + (k >> 3)] >> np.uint64(8 * (k & 7))) & _U8


@njit(inline="always")
def _plen(row):
    return int(row[2] >> _PLEN_SHIFT)


@njit(inline="always")
def _bitlen(v):
    n = 0
    while v:
        v >>= 1
        n += 1
    return n


@njit(inline="always")
def _packed_add(row, pbits, nbits):
    plen = _plen(row)
    if plen >= PACKED_CAPACITY:
        return False
    left = np.uint64(0)
    if plen > 0:
        left = _ptr(row, plen - 1)
    end = left + np.uint64(nbits)
    if end > np.uint64(64):
        return False
    row[0] |= pbits << left
    w = 1 + (plen >> 3)
    row[w] |= end << np.uint64(8 * (plen & 7))
    row[2] = (row[2] & _LOW56) | (np.uint64(plen + 1) << _PLEN_SHIFT)
    return True


@njit(inline="always")
def _packed_get(row, pos):
    left = np.uint64(0)
    if pos > 0:
        left = _ptr(row, pos - 1)
    width = _ptr(row, pos) - left
    copy = (row[0] >> left) & ((np.uint64(1) << width) - np.uint64(1))
    return np.int64((copy << np.uint64(1)) | np.uint64(1))


@njit(nogil=True, cache=True)
def packed_add(row, p):
    """Append odd prime ``p`` to one slot row; False when it does not fit."""
    pbits = np.uint64(p >> 1)
    return _packed_add(row, pbits, _bitlen(p >> 1))


@njit(nogil=True, cache=True)
def packed_get(row, pos):
    return _packed_get(row, pos)


@njit(nogil=True, cache=True)
def sieve_window(x1, length, skip_two, use_gaps, count, primes, half_gaps, exc_idx,
                 exc_gap, packed, words, plain):
    """Clear the slots for [x1, x1+length) and cross off every table prime.

    ``count`` is the number of primes in the table. Returns the number of
    crossings, or a negative error code.
    """
    if packed:
        words[:length, :] = 0
    else:
        plain[:length, :] = 0
    x2 = x1 + length
    crossings = 0
    p = 0
    k_exc = 0
    for j in range(count):
        if use_gaps:
            if j == 0:
                p = 2
            elif j == 1:
                p = 3
            else:
                h = half_gaps[j - 2]
                if h == 0:
                    if k_exc >= exc_idx.shape[0] or exc_idx[k_exc] != j - 2:
                        return ERR_CORRUPT
                    p += exc_gap[k_exc]
                    k_exc += 1
                else:
                    p += 2 * np.int64(h)
        else:
            p = primes[j]
        if p >= x2:
            break
        if p == 2 and skip_two:
            continue
        first = (p - x1 % p) % p
        if packed:
            pbits = np.uint64(p >> 1)
            nbits = _bitlen(p >> 1)
            for i in range(first, length, p):
                if not _packed_add(words[i], pbits, nbits):
                    return ERR_CAPACITY
        else:
            for i in range(first, length, p):
                e = plain[i, PLAIN_CELLS]
                if e >= PLAIN_CELLS:
                    return ERR_CAPACITY
                plain[i, e] = p
                plain[i, PLAIN_CELLS] = e + 1
        crossings += (length - 1 - first) // p + 1 if first < length else 0
    return crossings


@njit(nogil=True, cache=True)
def complete_window(x1, length, table_limit, packed, words, plain, start, step,
                    emit, out_p, out_e, out_k, stats):
    """Turn sieved slots into full factorizations.

    Visits offsets start, start+step, ... < length. ``stats`` accumulates
    [primes, sum Omega, sum omega, integers visited]. With ``emit`` set,
    row i of ``out_p``/``out_e`` receives the factors of x1+i and
    ``out_k[i]`` their number. Returns 0 or a negative error code.
    """
    for i in range(start, length, step):
        n = x1 + i
        c = n
        k = 0
        big_omega = 0
        if packed:
            row = words[i]
            if c & 1 == 0:
                e = 0
                while c & 1 == 0:
                    c >>= 1
                    e += 1
                if emit:
                    out_p[i, k] = 2
                    out_e[i, k] = e
                k += 1
                big_omega += e
            m = _plen(row)
        else:
            m = plain[i, PLAIN_CELLS]
        for pos in range(m):
            if packed:
                p = _packed_get(row, pos)
            else:
                p = np.int64(plain[i, pos])
            e = 0
            while c % p == 0:
                c //= p
                e += 1
            if e == 0:
                return ERR_CORRUPT
            if emit:
                out_p[i, k] = p
                out_e[i, k] = e
            k += 1
            big_omega += e
        if c > 1:
            if c <= table_limit:
                return ERR_CORRUPT
            if emit:
                out_p[i, k] = c
                out_e[i, k] = 1
            k += 1
            big_omega += 1
        if emit:
            out_k[i] = k
        if big_omega == 1:
            stats[0] += 1
        stats[1] += big_omega
        stats[2] += k
        stats[3] += 1
    return 0
