import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import primes_upto
from segfactor.errors import CorruptionError, DomainError
from segfactor.prime_store import (
    GapCompressedPrimeTable,
    build_prime_table,
    explicit_size_bits,
    from_parts,
    limit_for,
    prime_iterator,
    simple_sieve,
    table_size_bits,
)


def test_limit_20():
    t = build_prime_table(20)
    assert list(t) == [2, 3, 5, 7, 11, 13, 17, 19]
    assert t.count == 8
    # gaps from 3: 2, 2, 4, 2, 4, 2
    assert t.half_gaps.tolist() == [1, 1, 2, 1, 2, 1]
    assert t.exceptions == ()
    assert table_size_bits(t) == 48


def test_limit_3_is_all_implicit():
    t = build_prime_table(3)
    assert list(t) == [2, 3]
    assert t.count == 2 and len(t.half_gaps) == 0 and t.exceptions == ()
    assert table_size_bits(t) == 0


def test_limit_2():
    t = build_prime_table(2)
    assert list(t) == [2]
    assert t.count == 1


@pytest.mark.parametrize("limit", [1, 0, -5])
def test_limit_below_two(limit):
    with pytest.raises(DomainError):
        build_prime_table(limit)


def test_limit_10k():
    t = build_prime_table(10**4)
    ref = primes_upto(10**4)
    assert t.count == len(ref) == 1229
    assert int(t.half_gaps.max()) == 18 == int(np.diff(ref[1:]).max()) // 2
    assert t.exceptions == ()
    assert len(t.half_gaps) == t.count - 2


def test_sentinel_escape_path():
    t = from_parts(1000, [0], [(0, 512)])
    assert list(prime_iterator(t)) == [2, 3, 515]
    assert t.to_array().tolist() == [2, 3, 515]
    assert table_size_bits(t) == 8 + 128


def test_sentinel_mixed_with_cells():
    t = from_parts(10**6, [1, 0, 2, 0], [(3, 600), (1, 520)])
    assert t.exceptions == ((1, 520), (3, 600))
    assert list(t) == [2, 3, 5, 525, 529, 1129]
    assert t.to_array().tolist() == list(t)


def test_sentinel_without_exception_is_corruption():
    t = from_parts(1000, [1, 0, 1], [])
    with pytest.raises(CorruptionError):
        list(prime_iterator(t))
    with pytest.raises(CorruptionError):
        t.to_array()


def test_forced_exceptions_from_builder(monkeypatch):
    import segfactor.prime_store as ps

    # shrink the cell range so ordinary gaps overflow
    monkeypatch.setattr(ps, "CELL_MAX", 2)
    t = ps.build_prime_table(200)
    assert t.exceptions
    assert all(t.half_gaps[i] == 0 and g > 4 for i, g in t.exceptions)
    assert int(np.count_nonzero(t.half_gaps == 0)) == len(t.exceptions)
    assert list(t) == primes_upto(200).tolist()


def test_iterator_restartable():
    t = build_prime_table(1000)
    assert list(t) == list(t)
    before = t.half_gaps.copy()
    it = iter(t)
    next(it), next(it), next(it)
    assert np.array_equal(t.half_gaps, before)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=2, max_value=10**7))
def test_roundtrip_matches_independent_sieve(limit):
    t = build_prime_table(limit)
    ref = primes_upto(limit)
    assert np.array_equal(t.to_array(), ref)
    assert t.count == len(ref)
    assert all(1 <= v <= 255 for v in set(t.half_gaps.tolist()))


@given(st.integers(min_value=2, max_value=20000))
def test_iterator_strictly_increasing(limit):
    out = list(build_prime_table(limit))
    assert all(a < b for a, b in zip(out, out[1:]))
    assert out == primes_upto(limit).tolist()


def _explicit_bits(limit):
    return sum(int(p).bit_length() for p in primes_upto(limit))


def test_gap_table_break_even():
    # primes below 256 need <= 8 bits each; bytes only win from 569 on
    assert table_size_bits(build_prime_table(568)) >= _explicit_bits(568)
    assert table_size_bits(build_prime_table(569)) < _explicit_bits(569)


@given(st.integers(min_value=569, max_value=10**6))
def test_gap_table_smaller_than_explicit_bits(limit):
    assert table_size_bits(build_prime_table(limit)) < _explicit_bits(limit)


def test_simple_sieve_small_edges():
    assert simple_sieve(1).tolist() == []
    for n in range(2, 60):
        assert simple_sieve(n).tolist() == primes_upto(n).tolist()


def test_limit_for():
    assert limit_for(10**16) == 10**8
    assert limit_for(10**16 + 2) == 10**8 + 1
    assert limit_for(10) == 3
    for hi in range(3, 500):
        L = limit_for(hi)
        assert L * L >= hi - 1 and (L - 1) ** 2 < hi - 1 or L == 2


def test_dump_roundtrip():
    t = from_parts(10**6, [1, 0, 2, 0], [(1, 520), (3, 600)])
    buf = io.BytesIO()
    t.save(buf)
    raw = buf.getvalue()
    assert raw[:4] == b"GPT1"
    assert len(raw) == 4 + 16 + 4 + 4 + 2 * 16
    back = GapCompressedPrimeTable.load(io.BytesIO(raw))
    assert back == t and list(back) == list(t)


def test_dump_rejects_garbage():
    with pytest.raises(CorruptionError):
        GapCompressedPrimeTable.load(io.BytesIO(b"XXXX" + bytes(20)))
    t = build_prime_table(100)
    buf = io.BytesIO()
    t.save(buf)
    with pytest.raises(CorruptionError):
        GapCompressedPrimeTable.load(io.BytesIO(buf.getvalue()[:-3]))


def test_explicit_size():
    t = build_prime_table(10**6)
    assert explicit_size_bits(t) == 64 * 78498
    assert table_size_bits(t) == 8 * (78498 - 2)
