#!/usr/bin/env python3
"""Equidistribution, two-speed decorrelation, and the weighted averages.

For a generic point (cusp direction e): Birkhoff averages of a bump
observable approach its Haar mean, the speed-(2,3) correlation of the
mean-zero part decays toward zero, and the Mobius-weighted orbit average
shrinks along a ladder of N.
"""

import time

from horomu import (ModularPoint, birkhoff_average, bump_observable, haar_mean,
                    mobius_disjointness_sum, pair_correlation, sieve_mobius,
                    split_observable)

xi = ModularPoint.lower("inv_e")
f = bump_observable(2.0, 0.5)
c = haar_mean(f)
print(f"Haar mean of the bump observable: {c:.6f}")

print("\nBirkhoff averages along the orbit:")
for n in (10 ** 3, 10 ** 4, 10 ** 5):
    avg = birkhoff_average(f, xi, n)
    print(f"  N = {n:7d}: {avg:.6f}   (gap to Haar {avg - c:+.2e})")

f1, _ = split_observable(f)
print("\ntwo-speed correlation of the mean-zero part, speeds (2, 3):")
for n in (10 ** 3, 10 ** 4, 10 ** 5):
    t0 = time.time()
    est = pair_correlation(f1, xi, 2, 3, n, target=0.0)
    print(f"  N = {n:7d}: {est.value:+.3e}   [{time.time() - t0:.1f}s]")

print("\nMobius-weighted orbit averages (1/N) sum mu(n) f(T^n xi):")
N = 10 ** 5
mu = sieve_mobius(N)
rep = mobius_disjointness_sum(xi, f, N, mu)
for row in rep.rows:
    print(f"  N = {row.n:7d}: average {row.average:+.3e}   "
          f"mean-zero part {row.centered_average:+.3e}   "
          f"mu-mean {row.nu_mean:+.3e}")
print("\n(no rate is claimed; the trend toward zero is the point)")
