#!/usr/bin/env python3
"""Analytic working space of each variant over the published delta grid."""
from segfactor.bench import REFERENCE_DELTAS, space_report
from segfactor.prime_store import build_prime_table, limit_for
from segfactor.sieve import Variant

HI = 10**16

table = build_prime_table(limit_for(HI))
print(f"hi = {HI}, sieving primes = {table.count}")
print(f"{'delta':>10} {'variant':>7} {'slot MiB':>10} {'table MiB':>10} {'total Mbit':>11}")
for delta in REFERENCE_DELTAS:
    for v in Variant:
        slot, tab, bits = space_report(v, delta, HI, table)
        print(f"{delta:>10} {v.value:>7} {slot / 2**20:>10.1f} {tab / 2**20:>10.2f} {bits / 1e6:>11.1f}")
