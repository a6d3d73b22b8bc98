"""Bulk factorization of integer ranges with a space-reduced segmented sieve."""
from .errors import CapacityError, CorruptionError, DomainError, SieveError, SinkError
from .packed import PackedFactorList
from .prime_store import GapCompressedPrimeTable, build_prime_table, prime_iterator, table_size_bits
from .sieve import (
    Factorization,
    OutputMode,
    RunSummary,
    Segment,
    SieveConfig,
    Variant,
    complete_factorization,
    count_crossings_expected,
    default_delta,
    iter_factorizations,
    run,
    sieve_segment,
)

__all__ = [
    "CapacityError", "CorruptionError", "DomainError", "SieveError", "SinkError",
    "PackedFactorList", "GapCompressedPrimeTable", "build_prime_table", "prime_iterator",
    "table_size_bits", "Factorization", "OutputMode", "RunSummary", "Segment", "SieveConfig",
    "Variant", "complete_factorization", "count_crossings_expected", "default_delta",
    "iter_factorizations", "run", "sieve_segment",
]
