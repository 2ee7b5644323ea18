"""Sieves and tables for primes and bounded multiplicative functions.

All tables are immutable numpy arrays built by single-writer segmented
sieves; every construction is deterministic (no probabilistic primality
anywhere) so downstream reports reproduce bit-for-bit.
"""

from __future__ import annotations

import csv
import math
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import CapacityError, RangeCoverageError, ValidationError

# Memory budgets: one-byte values allow tables up to ~1e8 entries.
DEFAULT_SIEVE_BUDGET = 200_000_000
SEGMENT = 1 << 20


class PrimeTable:
    """Sorted primes up to ``n_max``; read-only after construction."""

    def __init__(self, n_max: int, primes: np.ndarray):
        self.n_max = int(n_max)
        self.primes = primes
        self.primes.setflags(write=False)

    def __len__(self):
        return len(self.primes)

    def __iter__(self):
        return iter(self.primes)

    def contains(self, p: int) -> bool:
        i = int(np.searchsorted(self.primes, p))
        return i < len(self.primes) and int(self.primes[i]) == p

    def in_range(self, lo, hi) -> np.ndarray:
        """Primes p with lo <= p < hi (exact rational bounds accepted)."""
        lo_int = _ceil_exact(lo)
        hi_int = _ceil_exact(hi)  # p < hi  <=>  p <= ceil(hi)-1
        i = int(np.searchsorted(self.primes, lo_int))
        j = int(np.searchsorted(self.primes, hi_int))
        return self.primes[i:j]

    def __repr__(self):
        return f"PrimeTable(n_max={self.n_max}, count={len(self.primes)})"


def _ceil_exact(x) -> int:
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, Fraction):
        return -((-x.numerator) // x.denominator)
    return math.ceil(x)


def sieve_primes(n_max: int, budget: int = DEFAULT_SIEVE_BUDGET) -> PrimeTable:
    """All primes <= n_max by a segmented sieve of Eratosthenes."""
    n_max = int(n_max)
    if n_max < 2:
        raise ValidationError(f"sieve_primes requires n_max >= 2, got {n_max}")
    if n_max > budget:
        raise CapacityError(f"n_max={n_max} exceeds sieve budget {budget}")
    root = math.isqrt(n_max)
    base = np.ones(root + 1, dtype=bool)
    base[:2] = False
    for i in range(2, math.isqrt(root) + 1):
        if base[i]:
            base[i * i:: i] = False
    small = np.nonzero(base)[0].astype(np.int64)
    chunks = [small[small <= n_max]]
    lo = root + 1
    while lo <= n_max:
        hi = min(lo + SEGMENT, n_max + 1)
        seg = np.ones(hi - lo, dtype=bool)
        for p in small:
            p = int(p)
            start = ((lo + p - 1) // p) * p
            if start < p * p:
                start = p * p
            if start < hi:
                seg[start - lo:: p] = False
        chunks.append(np.nonzero(seg)[0].astype(np.int64) + lo)
        lo = hi
    return PrimeTable(n_max, np.concatenate(chunks))


class MultiplicativeTable:
    """Values of a bounded multiplicative function on [1, n_max].

    mu and lambda are stored as int8; general complex tables use
    complex128. Index 0 is unused and holds 0.
    """

    def __init__(self, n_max: int, values: np.ndarray, label: str):
        self.n_max = int(n_max)
        self.values = values
        self.label = label
        self.values.setflags(write=False)
        if values.shape != (self.n_max + 1,):
            raise ValidationError("values array must have length n_max+1")
        if self.n_max >= 1 and complex(values[1]) != 1:
            raise ValidationError(f"{label}: a multiplicative table needs value(1) = 1")
        if values.dtype == np.int8:
            if values.size > 1 and (int(values.min()) < -1 or int(values.max()) > 1):
                raise ValidationError(f"{label}: values must satisfy |value| <= 1")
        else:
            for lo in range(1, self.n_max + 1, SEGMENT):
                hi = min(lo + SEGMENT, self.n_max + 1)
                if float(np.abs(values[lo:hi]).max()) > 1 + 1e-12:
                    raise ValidationError(f"{label}: values must satisfy |value| <= 1")

    def value(self, n: int):
        if not 1 <= n <= self.n_max:
            raise RangeCoverageError(f"{self.label} table covers [1,{self.n_max}], got {n}")
        v = self.values[n]
        return int(v) if self.values.dtype == np.int8 else complex(v)

    def as_complex(self) -> np.ndarray:
        return self.values.astype(np.complex128)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["n", "value"])
            for n in range(1, self.n_max + 1):
                v = self.values[n]
                if self.values.dtype == np.int8:
                    w.writerow([n, int(v)])
                else:
                    c = complex(v)
                    w.writerow([n, repr(c.real) if c.imag == 0 else repr(c)])

    @classmethod
    def from_csv(cls, path, label: str = "table") -> "MultiplicativeTable":
        ns, vs = [], []
        with open(path, newline="") as fh:
            r = csv.reader(fh)
            header = next(r)
            if [h.strip() for h in header[:2]] != ["n", "value"]:
                raise ValidationError(f"{path}: expected header n,value")
            for row in r:
                ns.append(int(row[0]))
                vs.append(complex(row[1]))
        if not ns:
            raise ValidationError(f"{path}: empty table")
        n_max = max(ns)
        values = np.zeros(n_max + 1, dtype=np.complex128)
        for n, v in zip(ns, vs):
            values[n] = v
        return cls(n_max, values, label)

    def __repr__(self):
        return f"MultiplicativeTable({self.label}, n_max={self.n_max})"


def _sieved_signs(n_max: int, budget: int, liouville: bool) -> np.ndarray:
    """Segmented sign sieve shared by mu and lambda.

    Tracks, per segment, the product of the prime powers removed so the
    one large prime factor (> sqrt) left over can be accounted for.
    """
    n_max = int(n_max)
    if n_max < 1:
        raise ValidationError(f"sieve requires n_max >= 1, got {n_max}")
    if n_max > budget:
        raise CapacityError(f"n_max={n_max} exceeds sieve budget {budget}")
    root = math.isqrt(n_max)
    small = sieve_primes(max(root, 2)).primes
    out = np.zeros(n_max + 1, dtype=np.int8)
    out[1:] = 1
    for lo in range(1, n_max + 1, SEGMENT):
        hi = min(lo + SEGMENT, n_max + 1)
        seg = out[lo:hi].copy()
        rem = np.arange(lo, hi, dtype=np.int64)
        for p in small:
            p = int(p)
            if p >= hi:
                break
            pk = p
            first_power = True
            while pk < hi:
                start = ((lo + pk - 1) // pk) * pk
                if start < hi:
                    idx = np.arange(start, hi, pk) - lo
                    if liouville:
                        seg[idx] = -seg[idx]
                    elif first_power:
                        seg[idx] = -seg[idx]
                    else:
                        seg[idx] = 0
                    rem[idx] //= p
                if not liouville and not first_power:
                    break
                first_power = False
                if pk > hi // p + 1:
                    break
                pk *= p
        large = rem > 1  # exactly one prime factor > sqrt(n) remains
        seg[large] = -seg[large]
        out[lo:hi] = seg
    out[0] = 0
    if n_max >= 1:
        out[1] = 1
    return out


def sieve_mobius(n_max: int, budget: int = DEFAULT_SIEVE_BUDGET) -> MultiplicativeTable:
    """mu(n) for n in [1, n_max]: (-1)^k on squarefree n with k prime factors, else 0."""
    return MultiplicativeTable(n_max, _sieved_signs(n_max, budget, liouville=False),
                               "mobius")


def sieve_liouville(n_max: int, budget: int = DEFAULT_SIEVE_BUDGET) -> MultiplicativeTable:
    """lambda(n) = (-1)^Omega(n), counting prime factors with multiplicity."""
    return MultiplicativeTable(n_max, _sieved_signs(n_max, budget, liouville=True),
                               "liouville")


@dataclass(frozen=True)
class PrimeBlock:
    """Primes in the half-open interval [ (1+alpha)^j, (1+alpha)^(j+1) ).

    Bounds are exact rationals so membership of integer primes is decided
    without float comparisons; consecutive blocks tile their range.
    """

    j: int
    lo: Fraction
    hi: Fraction
    primes: np.ndarray

    def __post_init__(self):
        self.primes.setflags(write=False)

    def __len__(self):
        return len(self.primes)


def prime_blocks(alpha, j_lo: int, j_hi: int, primes: PrimeTable) -> list[PrimeBlock]:
    """Blocks P_j for j_lo <= j <= j_hi, half-open so each prime lands once."""
    alpha = Fraction(alpha)
    if not 0 < alpha <= 1:
        raise ValidationError(f"prime_blocks requires alpha in (0,1], got {alpha}")
    if j_lo > j_hi:
        raise ValidationError(f"prime_blocks requires j_lo <= j_hi, got {j_lo} > {j_hi}")
    base = 1 + alpha
    top = base ** (j_hi + 1)
    if top > primes.n_max:
        raise RangeCoverageError(
            f"prime table covers {primes.n_max} but blocks need (1+alpha)^{j_hi + 1} "
            f"= {float(top):.6g}")
    blocks = []
    bound = base ** j_lo
    for j in range(j_lo, j_hi + 1):
        lo, hi = bound, bound * base
        blocks.append(PrimeBlock(j, lo, hi, primes.in_range(lo, hi)))
        bound = hi
    return blocks


def nth_prime_index(primes: PrimeTable, p: int) -> int:
    """Index of p in the table; raises if absent."""
    i = bisect_left(primes.primes, p)
    if i == len(primes.primes) or int(primes.primes[i]) != p:
        raise ValidationError(f"{p} is not in the prime table")
    return i
