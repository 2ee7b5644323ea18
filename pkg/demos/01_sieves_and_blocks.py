#!/usr/bin/env python3
"""Sieve tables and geometric prime blocks.

Builds the Mobius and Liouville tables, shows the classical partial sums,
and slices the primes into blocks between consecutive powers of 1 + alpha.
"""

from fractions import Fraction

from horomu import prime_blocks, sieve_liouville, sieve_mobius, sieve_primes

N = 10 ** 5

primes = sieve_primes(N)
print(f"primes up to {N}: {len(primes)} of them, largest {int(primes.primes[-1])}")

mu = sieve_mobius(N)
lam = sieve_liouville(N)
print("mu(1..10) =", [mu.value(n) for n in range(1, 11)])
print("Mertens sums M(N) = sum mu(n):")
for n in (100, 1000, 10_000, 100_000):
    print(f"  M({n}) = {int(mu.values[1:n + 1].sum()):6d}"
          f"    sum lambda = {int(lam.values[1:n + 1].sum()):6d}")

print()
print("blocks of primes in [(1+a)^j, (1+a)^(j+1)) for a = 1/2:")
blocks = prime_blocks(Fraction(1, 2), 2, 14, primes)
for b in blocks:
    head = ", ".join(str(int(p)) for p in b.primes[:6])
    more = " ..." if len(b.primes) > 6 else ""
    print(f"  j={b.j:2d}  [{float(b.lo):9.2f}, {float(b.hi):9.2f})  "
          f"{len(b.primes):3d} primes: {head}{more}")

print()
print("each prime lands in exactly one block (half-open tiling):")
union = sorted(int(p) for b in blocks for p in b.primes)
lo, hi = float(blocks[0].lo), float(blocks[-1].hi)
inside = [int(p) for p in primes.primes if lo <= p < hi]
print(f"  union of blocks == primes in [{lo:.2f}, {hi:.2f}): {union == inside}")
