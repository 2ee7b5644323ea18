"""Decomposition of [1, N) into well-factored prime-block products.

Given a ratio parameter alpha and indices j0 < j1, set D0 = (1+alpha)^j0
and D1 = (1+alpha)^j1. The integers below N split into

* ``NOT_IN_S``: no prime factor strictly inside (D0, D1);
* ``UNIQUE(j)``: the least block P_j = primes in [(1+alpha)^j, (1+alpha)^(j+1))
  dividing n contains exactly one divisor of n, to the first power;
* ``MULTIPLE(j)``: the least block dividing n does so with a repeated or
  second prime (these are discarded into the leftover).

Blocks run j = j0 .. j1-1 so that they tile [D0, D1) exactly; a UNIQUE(j)
element n = p*q lands in the product set P_j Q_j when its cofactor q stays
below N/(1+alpha)^(j+1) (then q automatically has no block factor at all,
so the factorization map P_j x Q_j -> P_j Q_j is one-to-one).

All interval bounds are exact rationals; all counts are exact integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .arith import PrimeBlock, PrimeTable, prime_blocks
from .errors import CapacityError, DomainError, ValidationError

DEFAULT_DECOMP_BUDGET = 30_000_000

TAG_NOT_IN_S = 0
TAG_UNIQUE = 1
TAG_MULTIPLE = 2

_TAG_NAMES = {TAG_NOT_IN_S: "not_in_s", TAG_UNIQUE: "unique", TAG_MULTIPLE: "multiple"}


def default_schedule(alpha) -> tuple[int, int]:
    """The canonical (j0, j1) for a given alpha: j0 = ceil((1/a) ln(1/a)^3), j1 = j0^2.

    Only defined for alpha < 1/e (so ln(1/alpha) > 1). These defaults are
    astronomically large for desk N, hence every entry point accepts
    explicit overrides.
    """
    a = float(alpha)
    if not 0 < a < 1 / math.e:
        raise DomainError(f"default_schedule needs 0 < alpha < 1/e, got {alpha}")
    j0 = math.ceil((1 / a) * math.log(1 / a) ** 3)
    return j0, j0 * j0


@dataclass(frozen=True)
class DecompositionParams:
    """Window size N, ratio alpha in (0,1], and block index range."""

    n: int
    alpha: Fraction
    j0: int
    j1: int

    def __post_init__(self):
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        if self.n < 2:
            raise ValidationError(f"need N >= 2, got {self.n}")
        if not 0 < self.alpha <= 1:
            raise ValidationError(f"need alpha in (0, 1], got {self.alpha}")
        if not 0 < self.j0 <= self.j1:
            raise ValidationError(f"need 0 < j0 <= j1, got j0={self.j0}, j1={self.j1}")
        if self.d1 >= self.n:
            raise ValidationError(
                f"need D1 < N: D1 = (1+alpha)^j1 = {float(self.d1):.6g} >= N = {self.n}")

    @property
    def base(self) -> Fraction:
        return 1 + self.alpha

    @property
    def d0(self) -> Fraction:
        return self.base ** self.j0

    @property
    def d1(self) -> Fraction:
        return self.base ** self.j1

    @property
    def block_range(self) -> range:
        """Block indices j0 .. j1-1: these tile [D0, D1)."""
        return range(self.j0, self.j1)

    def q_limit(self, j: int) -> Fraction:
        """Upper bound N/(1+alpha)^(j+1) for cofactors attached to block j."""
        return Fraction(self.n) / self.base ** (j + 1)

    def q_max(self, j: int) -> int:
        """Largest admissible integer cofactor: m < q_limit(j)."""
        lim = self.q_limit(j)
        m = lim.numerator // lim.denominator
        if Fraction(m) == lim:
            m -= 1
        return m


@dataclass(frozen=True)
class Classification:
    tag: int
    j: Optional[int] = None
    prime: Optional[int] = None

    @property
    def name(self) -> str:
        return _TAG_NAMES[self.tag]


def classify(n: int, params: DecompositionParams, primes: PrimeTable) -> Classification:
    """Classify a single n by direct divisibility against the block primes.

    Independent of the vectorized builder: used as its cross-check oracle.
    """
    if not 1 <= n < params.n:
        raise ValidationError(f"classify needs 1 <= n < N, got {n}")
    flat_p, flat_j, interior = _flat_blocks(params, primes)
    if not flat_p.size:
        return Classification(TAG_NOT_IN_S)
    mask = (n % flat_p) == 0
    if not interior[mask].any():
        return Classification(TAG_NOT_IN_S)
    hit_idx = np.nonzero(mask)[0]
    least = int(flat_j[hit_idx[0]])
    in_least = hit_idx[flat_j[hit_idx] == least]
    witness = int(flat_p[in_least[0]])
    if len(in_least) == 1 and n % (witness * witness) != 0:
        return Classification(TAG_UNIQUE, least, witness)
    return Classification(TAG_MULTIPLE, least)


def q_membership(m: int, j: int, params: DecompositionParams,
                 primes: PrimeTable) -> bool:
    """m lies in Q_j: m < N/(1+alpha)^(j+1) and no block P_i with i <= j divides m."""
    if m < 1:
        raise ValidationError(f"q_membership needs m >= 1, got {m}")
    if j not in params.block_range:
        raise ValidationError(f"block index {j} outside {params.block_range}")
    if Fraction(m) >= params.q_limit(j):
        return False
    flat_p, flat_j, _ = _flat_blocks(params, primes)
    upto = flat_p[flat_j <= j]
    return not bool((m % upto == 0).any()) if upto.size else True


_BLOCK_CACHE: dict = {}


def _blocks(params: DecompositionParams, primes: PrimeTable) -> list[PrimeBlock]:
    key = (params, id(primes))
    got = _BLOCK_CACHE.get(key)
    if got is None:
        if len(_BLOCK_CACHE) > 64:
            _BLOCK_CACHE.clear()
        if params.j0 == params.j1:
            got = []
        else:
            got = prime_blocks(params.alpha, params.j0, params.j1 - 1, primes)
        _BLOCK_CACHE[key] = got
    return got


def _flat_blocks(params: DecompositionParams, primes: PrimeTable):
    """(sorted block primes, their block index, strict-interior mask)."""
    key = ("flat", params, id(primes))
    got = _BLOCK_CACHE.get(key)
    if got is None:
        blocks = _blocks(params, primes)
        if blocks:
            flat_p = np.concatenate([b.primes for b in blocks]).astype(np.int64)
            flat_j = np.concatenate([np.full(len(b), b.j, dtype=np.int64)
                                     for b in blocks])
        else:
            flat_p = np.zeros(0, dtype=np.int64)
            flat_j = np.zeros(0, dtype=np.int64)
        interior = np.array([params.d0 < int(p) < params.d1 for p in flat_p],
                            dtype=bool)
        got = (flat_p, flat_j, interior)
        _BLOCK_CACHE[key] = got
    return got


class Decomposition:
    """Classification arrays and exact counts for the whole window [1, N)."""

    def __init__(self, params, blocks, tags, block_of, unique_prime, in_pq, q_sets):
        self.params = params
        self.blocks = blocks
        self.tags = tags
        self.block_of = block_of
        self.unique_prime = unique_prime
        self.in_pq = in_pq
        self.q_sets = q_sets  # j -> sorted array of Q_j members
        for arr in (tags, block_of, unique_prime, in_pq):
            arr.setflags(write=False)

    # -- per-n views ----------------------------------------------------
    def classification(self, n: int) -> Classification:
        tag = int(self.tags[n])
        if tag == TAG_NOT_IN_S:
            return Classification(tag)
        j = int(self.block_of[n])
        p = int(self.unique_prime[n]) if tag == TAG_UNIQUE else None
        return Classification(tag, j, p)

    def q_set(self, j: int) -> np.ndarray:
        return self.q_sets[j]

    def block(self, j: int) -> PrimeBlock:
        return self.blocks[j - self.params.j0]

    def product_members(self, j: int) -> np.ndarray:
        """All n in P_j Q_j, ascending."""
        return np.nonzero(self.in_pq & (self.block_of == j))[0]

    # -- exact counts -----------------------------------------------------
    @property
    def window_size(self) -> int:
        return self.params.n - 1

    @property
    def count_not_in_s(self) -> int:
        return int(np.count_nonzero(self.tags[1:] == TAG_NOT_IN_S))

    @property
    def count_s(self) -> int:
        return self.window_size - self.count_not_in_s

    def count_s_j(self, j: int) -> int:
        return int(np.count_nonzero((self.tags == TAG_UNIQUE) & (self.block_of == j)))

    def count_multiple_j(self, j: int) -> int:
        return int(np.count_nonzero((self.tags == TAG_MULTIPLE) & (self.block_of == j)))

    def count_pq_j(self, j: int) -> int:
        return int(np.count_nonzero(self.in_pq & (self.block_of == j)))

    @property
    def count_multiple(self) -> int:
        return int(np.count_nonzero(self.tags == TAG_MULTIPLE))

    @property
    def count_pq(self) -> int:
        return int(np.count_nonzero(self.in_pq))

    @property
    def leftover_count(self) -> int:
        return self.window_size - self.count_pq

    def leftover_mask(self) -> np.ndarray:
        mask = ~self.in_pq
        mask[0] = False
        return mask


def build_decomposition(params: DecompositionParams, primes: PrimeTable,
                        budget: int = DEFAULT_DECOMP_BUDGET) -> Decomposition:
    """Classify every n in [1, N) and mark the product sets, by sieving.

    One pass per block prime marks least-block indices, then counts the
    divisors inside that least block, flags repeated factors, and records
    the unique prime so the cofactor test n/p < N/(1+alpha)^(j+1) closes
    the product-set membership.
    """
    n = params.n
    if n > budget:
        raise CapacityError(f"N={n} exceeds decomposition budget {budget}")
    top = params.base ** params.j1
    if top > primes.n_max:
        raise ValidationError(
            f"prime table covers {primes.n_max}, blocks need {float(top):.6g}")
    blocks = _blocks(params, primes)

    no_block = np.int16(params.j1)  # sentinel above any real block index
    block_of = np.full(n, no_block, dtype=np.int16)
    in_s = np.zeros(n, dtype=bool)
    d0, d1 = params.d0, params.d1
    for block in blocks:
        for p in block.primes:
            p = int(p)
            view = block_of[p::p]
            view[view == no_block] = block.j
            if d0 < p < d1:
                in_s[p::p] = True

    divisor_count = np.zeros(n, dtype=np.int16)
    squared = np.zeros(n, dtype=bool)
    unique_prime = np.zeros(n, dtype=np.int64)
    for block in blocks:
        for p in block.primes:
            p = int(p)
            least = block_of[p::p] == block.j
            cnt = divisor_count[p::p]
            cnt[least] += 1
            up = unique_prime[p::p]
            up[least] = p
            p2 = p * p
            if p2 < n:
                least2 = block_of[p2::p2] == block.j
                sq = squared[p2::p2]
                sq[least2] = True

    tags = np.zeros(n, dtype=np.int8)
    tags[in_s] = TAG_MULTIPLE
    unique = in_s & (divisor_count == 1) & ~squared
    tags[unique] = TAG_UNIQUE
    block_of[tags == TAG_NOT_IN_S] = -1
    unique_prime[tags != TAG_UNIQUE] = 0

    in_pq = np.zeros(n, dtype=bool)
    q_sets = {}
    for block in blocks:
        j = block.j
        qmax = params.q_max(j)
        if qmax >= 1:
            free = np.ones(qmax + 1, dtype=bool)
            free[0] = False
            for b in blocks:
                if b.j > j:
                    break
                for p in b.primes:
                    p = int(p)
                    if p <= qmax:
                        free[p::p] = False
            q_sets[j] = np.nonzero(free)[0].astype(np.int64)
        else:
            q_sets[j] = np.zeros(0, dtype=np.int64)
        sel = unique & (block_of == j)
        idx = np.nonzero(sel)[0]
        if idx.size:
            cof = idx // unique_prime[idx]
            in_pq[idx[cof <= qmax]] = True

    return Decomposition(params, blocks, tags, block_of, unique_prime, in_pq, q_sets)


@dataclass(frozen=True)
class CoverageLine:
    """One measured count against the corresponding reference fraction of N."""

    name: str
    measured: int
    reference: float

    @property
    def holds(self) -> bool:
        return self.measured <= self.reference

    def as_dict(self) -> dict:
        return {"name": self.name, "measured": self.measured,
                "reference": repr(self.reference), "holds": self.holds}


@dataclass(frozen=True)
class CoverageReport:
    params: DecompositionParams
    lines: list[CoverageLine]
    mertens_product: float
    complement_fraction: Fraction
    leftover_fraction: Fraction
    schedule_reference: float  # 1/j0, the asymptotic value of the product
    boundary_primes: list[int]
    counts: dict = field(default_factory=dict)

    def line(self, name: str) -> CoverageLine:
        for ln in self.lines:
            if ln.name == name:
                return ln
        raise KeyError(name)

    def as_dict(self) -> dict:
        return {
            "n": self.params.n,
            "alpha": str(self.params.alpha),
            "j0": self.params.j0,
            "j1": self.params.j1,
            "d0": repr(float(self.params.d0)),
            "d1": repr(float(self.params.d1)),
            "lines": [ln.as_dict() for ln in self.lines],
            "mertens_product": repr(self.mertens_product),
            "schedule_reference": repr(self.schedule_reference),
            "complement_fraction": f"{self.complement_fraction.numerator}/"
                                   f"{self.complement_fraction.denominator}",
            "leftover_fraction": f"{self.leftover_fraction.numerator}/"
                                 f"{self.leftover_fraction.denominator}",
            "boundary_primes": self.boundary_primes,
            "counts": self.counts,
        }


def coverage_report(d: Decomposition, primes: PrimeTable) -> CoverageReport:
    """Exact measured coverage counts next to the alpha*N reference lines.

    The alpha, alpha, 2*alpha, 3*alpha fractions are asymptotic references
    only; each line records whether it already holds at this finite N.
    """
    params = d.params
    n = params.n
    a = float(params.alpha)
    unfactored = sum(d.count_s_j(j) - d.count_pq_j(j) for j in params.block_range)
    lines = [
        CoverageLine("complement_of_s", d.count_not_in_s, a * n),
        CoverageLine("multi_divisor_excess", d.count_multiple, a * n),
        CoverageLine("unfactored_tail", unfactored, 2 * a * n),
        CoverageLine("uncovered_total", d.leftover_count, 3 * a * n),
    ]
    product = 1.0
    boundary = []
    for p in primes.in_range(params.d0, params.d1):
        p = int(p)
        if Fraction(p) == params.d0:
            boundary.append(p)
            continue
        product *= 1 - 1 / p
    if params.d1.denominator == 1 and primes.contains(params.d1.numerator):
        boundary.append(params.d1.numerator)
    counts = {
        "window": d.window_size,
        "not_in_s": d.count_not_in_s,
        "in_s": d.count_s,
        "multiple": d.count_multiple,
        "product_sets": d.count_pq,
        "leftover": d.leftover_count,
        "per_block": {
            str(j): {"primes": len(d.block(j)), "q": len(d.q_set(j)),
                     "s_j": d.count_s_j(j), "pq_j": d.count_pq_j(j),
                     "multiple_j": d.count_multiple_j(j)}
            for j in params.block_range
        },
    }
    return CoverageReport(
        params=params,
        lines=lines,
        mertens_product=product,
        complement_fraction=Fraction(d.count_not_in_s, d.window_size),
        leftover_fraction=Fraction(d.leftover_count, d.window_size),
        schedule_reference=1 / params.j0,
        boundary_primes=boundary,
        counts=counts,
    )
