#!/usr/bin/env python3
"""Reduced horocycle orbits on the modular surface.

Evaluates the time-n point as a closed-form Moebius image, reduces it into
the fundamental domain |x| <= 1/2, |z| >= 1 with exact integer matrices,
and contrasts a rational (periodic-to-cusp) direction with a generic one.
"""

from fractions import Fraction

from horomu import (ModularPoint, OrbitEvaluator, genericity, horocycle_point,
                    reduce)

print("single reductions:")
for z in (1 + 1j, 0.3 + 0.1j, 2.7 + 0.05j):
    c = reduce(z)
    print(f"  {z}  ->  {c.x:+.6f} + {c.y:.6f}i   gamma = {c.gamma}")

print()
ident = ModularPoint.identity()
print(f"integral matrices are fixed points: {ident!r} "
      f"({genericity(ident).label})")
for n in (1, 10, 10 ** 6):
    c = horocycle_point(ident, n)
    print(f"  n = {n:<8d} point stays at ({c.x:.0f}, {c.y:.0f})")

print()
xi = ModularPoint.lower("inv_e")
g = genericity(xi)
print(f"xi = {xi!r}: cusp direction {g.cusp_direction} -> {g.label}")
print("first orbit points (x, y, frame angle):")
ev = OrbitEvaluator(xi, 30)
for n in range(1, 11):
    c = ev.coords(n)
    print(f"  n={n:2d}  x={c.x:+.4f}  y={c.y:7.4f}  theta={c.theta:.4f}")

print()
xi_rat = ModularPoint.lower(Fraction(1, 2))
g = genericity(xi_rat)
print(f"rational direction {g.cusp_direction}: {g.label}; conjugating the "
      "step by xi is integral only for n = 0 mod 4, so the orbit is a "
      "4-cycle instead of equidistributing:")
ev = OrbitEvaluator(xi_rat, 600)
for n in (1, 2, 3, 4, 5, 401):
    c = ev.coords(n)
    print(f"  n={n:3d}  x={c.x:+.6f}  y={c.y:.6f}")
