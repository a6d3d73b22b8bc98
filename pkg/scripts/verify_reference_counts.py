#!/usr/bin/env python3
"""Factor [10^16 - 10^9, 10^16) and compare the totals with the published ones.

    python scripts/verify_reference_counts.py --variant both --delta 2^21
"""
import argparse

from segfactor.bench import REFERENCE_COUNTS, REFERENCE_INTERVAL
from segfactor.cli import parse_int
from segfactor.sieve import SieveConfig, Variant, run


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--variant", default="both", choices=[v.value for v in Variant])
    ap.add_argument("--delta", type=parse_int, default=2**21)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    lo, hi = REFERENCE_INTERVAL
    s = run(SieveConfig(lo, hi, delta=args.delta, variant=args.variant), threads=args.threads)
    print(f"interval [{lo}, {hi})  variant={args.variant}  delta={args.delta}")
    print(f"primes                  {s.primes_found:>12}   published {REFERENCE_COUNTS[0]}")
    print(f"prime divisors (Omega)  {s.prime_divisors_found:>12}")
    print(f"prime divisors (omega)  {s.distinct_prime_divisors_found:>12}   published {REFERENCE_COUNTS[1]}")
    print(f"crossings {s.crossings}  segments {s.segments}  wall {s.wall_seconds:.1f}s")
    ok = s.primes_found == REFERENCE_COUNTS[0] and REFERENCE_COUNTS[1] in (
        s.prime_divisors_found, s.distinct_prime_divisors_found)
    print("MATCH" if ok else "MISMATCH")
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
