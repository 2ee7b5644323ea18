"""Bilinear orthogonality engine for bounded multiplicative weights.

Measures pair correlations sum_{m<=M} F(p1 m) conj(F(p2 m)), estimates the
correlation level tau over all prime pairs below a cutoff, and replays the
full inequality chain that turns small pair correlations into a bound

    |sum_{n} nu(n) F(n)|  <=  2 sqrt(tau log(1/tau)) N

on concrete data: triangle step over the block decomposition with the
leftover measured exactly, multiplicative factorization, Cauchy-Schwarz,
range extension, bilinear expansion into diagonal and off-diagonal parts.
Steps that are true inequalities at any finite N are checked as computed
numbers; steps that rely on asymptotic slack are reported as reference
lines with a hold/fail flag, never as errors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .arith import MultiplicativeTable, PrimeTable, sieve_primes
from .decomp import Decomposition, DecompositionParams, build_decomposition
from .errors import (CapacityError, DomainError, EmptyPairSetError, HorizonError,
                     ValidationError)
from .exactreal import frac_parts

DEFAULT_SEQUENCE_BUDGET = 50_000_000


class BoundedSequence:
    """A sequence F: [1, horizon] -> C with |F| <= 1, stored densely.

    Index 0 of the value array is unused. Construction validates the bound
    with a 1e-12 cushion for rounding.
    """

    def __init__(self, values: np.ndarray, label: str):
        values = np.asarray(values)
        if values.ndim != 1 or values.size < 2:
            raise ValidationError("sequence needs values for at least n=1")
        self.values = np.array(values, dtype=np.complex128)
        self.values[0] = 0
        self.label = label
        self.horizon = self.values.size - 1
        mags = np.abs(self.values[1:])
        top = float(mags.max()) if mags.size else 0.0
        if top > 1 + 1e-12:
            raise ValidationError(f"{label}: |F(n)| must stay <= 1, found {top}")
        self.values.setflags(write=False)

    def eval(self, n: int) -> complex:
        if not 1 <= n <= self.horizon:
            raise HorizonError(f"{self.label} defined on [1,{self.horizon}], got {n}")
        return complex(self.values[n])

    def multiples(self, p: int, count: int) -> np.ndarray:
        """F(p), F(2p), ..., F(count*p)."""
        if p * count > self.horizon:
            raise HorizonError(
                f"{self.label}: need index {p * count} beyond horizon {self.horizon}")
        return self.values[p:: p][:count]

    # -- constructors ---------------------------------------------------
    @classmethod
    def constant(cls, c, horizon: int, label: Optional[str] = None) -> "BoundedSequence":
        _check_budget(horizon)
        vals = np.full(horizon + 1, complex(c), dtype=np.complex128)
        return cls(vals, label or f"const:{c}")

    @classmethod
    def from_function(cls, fn: Callable[[np.ndarray], np.ndarray], horizon: int,
                      label: str) -> "BoundedSequence":
        _check_budget(horizon)
        ns = np.arange(horizon + 1, dtype=np.int64)
        vals = np.asarray(fn(ns), dtype=np.complex128)
        return cls(vals, label)

    @classmethod
    def from_multiplicative(cls, table: MultiplicativeTable) -> "BoundedSequence":
        return cls(table.as_complex(), table.label)

    @classmethod
    def exponential(cls, theta, horizon: int, label: Optional[str] = None) -> "BoundedSequence":
        """F(n) = exp(2 pi i n theta) with the angle reduced mod 1 exactly.

        theta may be a symbolic-constant name ('sqrt2', 'e', ...), an exact
        rational, or a float; reduction goes through the shared fixed-point
        channel so closed-form cross-checks see identical angles.
        """
        _check_budget(horizon)
        ns = np.arange(horizon + 1, dtype=np.int64)
        fr = frac_parts(theta, ns)
        vals = np.exp(2j * np.pi * fr)
        name = theta if isinstance(theta, str) else repr(theta)
        return cls(vals, label or f"exp:{name}")


def _check_budget(horizon: int, budget: int = DEFAULT_SEQUENCE_BUDGET) -> None:
    if horizon < 1:
        raise ValidationError(f"horizon must be >= 1, got {horizon}")
    if horizon > budget:
        raise CapacityError(f"horizon {horizon} exceeds sequence budget {budget}")


@dataclass(frozen=True)
class PairCorrelation:
    p1: int
    p2: int
    m: int
    total: complex
    normalized: float

    def as_dict(self) -> dict:
        return {"p1": self.p1, "p2": self.p2, "m": self.m,
                "total": [repr(self.total.real), repr(self.total.imag)],
                "normalized": repr(self.normalized)}


def bilinear_sum(F: BoundedSequence, p1: int, p2: int, M: int) -> PairCorrelation:
    """sum_{m<=M} F(p1 m) conj(F(p2 m)), exact pairwise-summed."""
    if p1 == p2:
        raise ValidationError("bilinear_sum needs distinct p1, p2")
    if M < 1:
        raise ValidationError(f"bilinear_sum needs M >= 1, got {M}")
    a = F.multiples(p1, M)
    b = F.multiples(p2, M)
    total = complex(np.sum(a * np.conj(b)))
    return PairCorrelation(p1, p2, M, total, abs(total) / M)


def _normalize_excluded(excluded) -> set[frozenset]:
    out = set()
    for pair in excluded or ():
        p, q = pair
        out.add(frozenset((int(p), int(q))))
    return out


@dataclass(frozen=True)
class TauEstimate:
    tau_hat: float
    worst_pair: tuple[int, int]
    pairs: list[PairCorrelation]
    excluded: list[tuple[int, int]]
    m_policy: str

    def as_dict(self) -> dict:
        return {"tau_hat": repr(self.tau_hat), "worst_pair": list(self.worst_pair),
                "excluded": [list(p) for p in self.excluded],
                "m_policy": self.m_policy,
                "pairs": [p.as_dict() for p in self.pairs]}


def tau_estimate(F: BoundedSequence, prime_cutoff: float,
                 M: Optional[int] = None, excluded: Sequence = (),
                 primes: Optional[PrimeTable] = None,
                 threads: int = 1, window: Optional[int] = None) -> TauEstimate:
    """Largest normalized pair correlation over distinct primes <= cutoff.

    With M=None each pair uses M = floor(window / max(p1, p2)), window
    defaulting to the horizon, so every sampled product stays inside the
    window; explicit M applies uniformly. Excluded pairs are skipped and
    echoed back, never silently dropped. Pairs are independent tasks; with
    threads > 1 they run on a pool but are reduced in pair order, so
    results match the serial run exactly.
    """
    if prime_cutoff < 3:
        raise EmptyPairSetError(f"no prime pairs below cutoff {prime_cutoff}")
    if primes is None or primes.n_max < prime_cutoff:
        primes = sieve_primes(max(int(prime_cutoff), 2))
    ps = [int(p) for p in primes.primes if p <= prime_cutoff]
    if len(ps) < 2:
        raise EmptyPairSetError(f"fewer than two primes below cutoff {prime_cutoff}")
    ref = F.horizon if window is None else min(window, F.horizon)
    skip = _normalize_excluded(excluded)
    jobs = []
    for i in range(len(ps)):
        for k in range(i + 1, len(ps)):
            p1, p2 = ps[i], ps[k]
            if frozenset((p1, p2)) in skip:
                continue
            m = M if M is not None else ref // max(p1, p2)
            if m < 1:
                raise HorizonError(
                    f"window {ref} cannot support pair ({p1},{p2})")
            jobs.append((p1, p2, m))
    if not jobs:
        raise EmptyPairSetError("all pairs below the cutoff were excluded")
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as pool:
            pairs = list(pool.map(lambda j: bilinear_sum(F, *j), jobs))
    else:
        pairs = [bilinear_sum(F, *j) for j in jobs]
    best = pairs[0]
    for pc in pairs[1:]:
        if pc.normalized > best.normalized:
            best = pc
    policy = (f"uniform:{M}" if M is not None
              else f"per-pair floor({ref}/max(p1,p2))")
    return TauEstimate(best.normalized, (best.p1, best.p2), pairs,
                       sorted(tuple(sorted(s)) for s in skip), policy)


def vinogradov_bound(tau: float, N: int) -> float:
    """2 sqrt(tau ln(1/tau)) N for tau in (0, 1)."""
    if not 0 < tau < 1:
        raise DomainError(f"bound needs tau in (0,1), got {tau}")
    return 2 * math.sqrt(tau * math.log(1 / tau)) * N


def weighted_sum(nu: MultiplicativeTable, F: BoundedSequence, N: int) -> complex:
    """sum_{n<=N} nu(n) F(n) with pairwise summation."""
    if N < 1:
        raise ValidationError(f"weighted_sum needs N >= 1, got {N}")
    if nu.n_max < N:
        raise HorizonError(f"nu table covers [1,{nu.n_max}], need {N}")
    if F.horizon < N:
        raise HorizonError(f"F covers [1,{F.horizon}], need {N}")
    return complex(np.sum(nu.values[1:N + 1] * F.values[1:N + 1]))


@dataclass(frozen=True)
class ChainLine:
    """One inequality of the proof chain evaluated on concrete numbers.

    ``exact`` marks steps that must hold at any finite N (triangle and
    Cauchy-Schwarz steps, crude diagonal bounds); non-exact lines compare
    against asymptotic reference quantities and may legitimately fail at
    desk scale.
    """

    name: str
    lhs: float
    rhs: float
    exact: bool

    @property
    def holds(self) -> bool:
        slack = 1e-9 * max(1.0, abs(self.lhs), abs(self.rhs))
        return self.lhs <= self.rhs + slack

    def as_dict(self) -> dict:
        return {"name": self.name, "lhs": repr(self.lhs), "rhs": repr(self.rhs),
                "exact": self.exact, "holds": self.holds}


@dataclass(frozen=True)
class BlockLedger:
    j: int
    pair_sum: complex          # sum over P_j Q_j of nu(x y) F(x y)
    factored_sum: complex      # same sum assembled as sum_y nu(y) sum_x nu(x) F(xy)
    inner_abs: float           # T_j = sum_{y in Q_j} |sum_x nu(x) F(xy)|
    cauchy: float              # |Q_j|^(1/2) (sum_{y in Q_j} |...|^2)^(1/2)
    extended: float            # range extended to all y <= Y_j
    diagonal: float            # sum_x sum_{y<=Y_j} |F(xy)|^2
    off_diagonal: float        # sum_{x1 != x2} |sum_y F(x1 y) conj(F(x2 y))|
    y_cap: int
    p_count: int
    q_count: int

    def as_dict(self) -> dict:
        return {"j": self.j,
                "pair_sum": [repr(self.pair_sum.real), repr(self.pair_sum.imag)],
                "inner_abs": repr(self.inner_abs), "cauchy": repr(self.cauchy),
                "extended": repr(self.extended), "diagonal": repr(self.diagonal),
                "off_diagonal": repr(self.off_diagonal),
                "y_cap": self.y_cap, "p_count": self.p_count, "q_count": self.q_count}


@dataclass(frozen=True)
class CriterionReport:
    n: int
    prime_cutoff: float
    tau: TauEstimate
    tau_effective: float
    bound_rhs: float
    weighted: complex          # sum over [1, N) of nu(n) F(n)
    leftover_sum: complex
    leftover_count: int
    blocks: list[BlockLedger]
    chain: list[ChainLine]
    verdict: str               # holds | fails | inconclusive
    margin: Optional[float]
    excluded: list[tuple[int, int]]
    params: DecompositionParams
    diagnostics: dict = field(default_factory=dict)

    def chain_line(self, name: str) -> ChainLine:
        for ln in self.chain:
            if ln.name == name:
                return ln
        raise KeyError(name)

    @property
    def exact_chain_holds(self) -> bool:
        return all(ln.holds for ln in self.chain if ln.exact)

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "prime_cutoff": self.prime_cutoff,
            "alpha": str(self.params.alpha),
            "j0": self.params.j0,
            "j1": self.params.j1,
            "tau_hat": repr(self.tau.tau_hat),
            "tau_effective": repr(self.tau_effective),
            "worst_pair": list(self.tau.worst_pair),
            "m_policy": self.tau.m_policy,
            "excluded": [list(p) for p in self.excluded],
            "bound_rhs": repr(self.bound_rhs),
            "weighted_sum": [repr(self.weighted.real), repr(self.weighted.imag)],
            "weighted_abs": repr(abs(self.weighted)),
            "leftover_count": self.leftover_count,
            "leftover_abs": repr(abs(self.leftover_sum)),
            "blocks": [b.as_dict() for b in self.blocks],
            "chain": [ln.as_dict() for ln in self.chain],
            "verdict": self.verdict,
            "margin": repr(self.margin) if self.margin is not None else None,
            "exact_chain_holds": self.exact_chain_holds,
            "diagnostics": self.diagnostics,
        }


def criterion_ledger(nu: MultiplicativeTable, F: BoundedSequence, N: int,
                     alpha, j0: int, j1: int, excluded: Sequence = (), *,
                     cutoff: float, primes: Optional[PrimeTable] = None,
                     decomposition: Optional[Decomposition] = None,
                     M: Optional[int] = None, threads: int = 1) -> CriterionReport:
    """Replay the whole inequality chain on actual data over [1, N).

    The window is half-open to match the decomposition partition; the
    range-extension step samples F up to ceil((1+alpha) * N), so the
    sequence horizon must reach that far.
    """
    params = DecompositionParams(N, Fraction(alpha), j0, j1)
    need = _ledger_horizon(params)
    if F.horizon < need:
        raise HorizonError(
            f"ledger needs F on [1,{need}] (range extension), horizon {F.horizon}")
    if nu.n_max < N - 1:
        raise HorizonError(f"nu table covers [1,{nu.n_max}], need {N - 1}")
    if primes is None:
        primes = sieve_primes(max(int(math.ceil(float(params.d1))) + 1, 3))
    if decomposition is None:
        decomposition = build_decomposition(params, primes)
    dec = decomposition

    nu_c = nu.as_complex()
    prod = nu_c[: N] * F.values[: N]

    left = dec.leftover_mask()
    leftover_sum = complex(np.sum(prod[left]))
    leftover_count = int(np.count_nonzero(left))
    total = complex(np.sum(prod[1:]))

    blocks = []
    for j in params.block_range:
        blocks.append(_block_ledger(dec, j, nu_c, F))

    tau = tau_estimate(F, cutoff, M=M, excluded=excluded, primes=primes,
                       threads=threads, window=N)
    tau_eff = max(tau.tau_hat, 1 / math.log(cutoff)) if cutoff > 1 else 1.0
    chain, diagnostics = _assemble_chain(params, blocks, total, leftover_sum, tau_eff)

    if 0 < tau_eff < 1:
        bound = vinogradov_bound(tau_eff, N)
        ratio = abs(total) / bound if bound > 0 else math.inf
        if ratio <= 1:
            verdict = "holds" if ratio <= 0.5 else "inconclusive"
        else:
            verdict = "fails" if ratio >= 2 else "inconclusive"
        margin = bound / abs(total) if abs(total) > 0 else math.inf
    else:
        bound = 0.0
        verdict = "inconclusive"
        margin = None
    return CriterionReport(
        n=N, prime_cutoff=cutoff, tau=tau, tau_effective=tau_eff,
        bound_rhs=bound, weighted=total, leftover_sum=leftover_sum,
        leftover_count=leftover_count, blocks=blocks, chain=chain,
        verdict=verdict, margin=margin,
        excluded=sorted(tuple(sorted(s)) for s in _normalize_excluded(excluded)),
        params=params, diagnostics=diagnostics)


def _ledger_horizon(params: DecompositionParams) -> int:
    lim = Fraction(params.n) * params.base
    return int(math.ceil(lim))


def _block_ledger(dec: Decomposition, j: int, nu_c: np.ndarray,
                  F: BoundedSequence) -> BlockLedger:
    params = dec.params
    block = dec.block(j)
    qs = dec.q_set(j)
    ps = block.primes.astype(np.int64)
    lim = Fraction(params.n) / params.base ** j
    y_cap = int(lim.numerator // lim.denominator)  # range extension is y <= lim

    members = dec.product_members(j)
    pair_sum = complex(np.sum(nu_c[members] * F.values[members])) if members.size else 0j

    if ps.size == 0 or qs.size == 0:
        return BlockLedger(j, pair_sum, 0j, 0.0, 0.0, 0.0, 0.0, 0.0,
                           y_cap, int(ps.size), int(qs.size))

    nu_p = nu_c[ps]
    # inner(y) = sum_{x in P_j} nu(x) F(x y) for y in Q_j
    fxq = F.values[(ps[:, None] * qs[None, :])]
    inner_q = nu_p @ fxq
    factored = complex(np.sum(nu_c[qs] * inner_q))
    t_j = float(np.sum(np.abs(inner_q)))
    sumsq_q = float(np.sum(np.abs(inner_q) ** 2))
    cauchy = math.sqrt(len(qs)) * math.sqrt(sumsq_q)

    ys = np.arange(1, y_cap + 1, dtype=np.int64)
    fxy = F.values[(ps[:, None] * ys[None, :])]
    inner_all = nu_p @ fxy
    sumsq_all = float(np.sum(np.abs(inner_all) ** 2))
    extended = math.sqrt(len(qs)) * math.sqrt(sumsq_all)

    gram = fxy @ fxy.conj().T  # gram[a,b] = sum_y F(p_a y) conj(F(p_b y))
    diag = float(np.sum(gram.diagonal().real))
    off = float(np.sum(np.abs(gram)) - np.sum(np.abs(gram.diagonal())))
    return BlockLedger(j, pair_sum, factored, t_j, cauchy, extended, diag, off,
                       y_cap, int(ps.size), int(qs.size))


def _assemble_chain(params: DecompositionParams, blocks: list[BlockLedger],
                    total: complex, leftover_sum: complex, tau_eff: float):
    n = params.n
    a = float(params.alpha)
    sum_pair_abs = sum(abs(b.pair_sum) for b in blocks)
    sum_inner = sum(b.inner_abs for b in blocks)
    sum_cauchy = sum(b.cauchy for b in blocks)
    sum_extended = sum(b.extended for b in blocks)
    sum_bracket = sum(math.sqrt(b.q_count * (b.diagonal + b.off_diagonal))
                      for b in blocks)
    diag_sqrt = sum(math.sqrt(b.q_count * b.diagonal) for b in blocks)
    diag_crude = sum(math.sqrt(b.q_count * b.p_count * b.y_cap) for b in blocks)
    off_sqrt = sum(math.sqrt(b.q_count * b.off_diagonal) for b in blocks)
    geom = sum(float(params.base) ** (-j) for j in params.block_range)

    chain = [
        ChainLine("triangle-partition", abs(total),
                  sum_pair_abs + abs(leftover_sum), True),
        ChainLine("multiplicative-factorization", sum_pair_abs, sum_inner, True),
        ChainLine("cauchy-schwarz", sum_inner, sum_cauchy, True),
        ChainLine("range-extension", sum_cauchy, sum_extended, True),
        ChainLine("bilinear-expansion", sum_extended, sum_bracket, True),
        ChainLine("diagonal-crude", diag_sqrt, diag_crude, True),
        ChainLine("diagonal-aggregate", diag_crude, n * math.sqrt(geom), True),
        ChainLine("end-to-end", abs(total), sum_bracket + abs(leftover_sum), True),
        # asymptotic reference lines: these expect small alpha and huge D0,
        # so at desk parameters a failure is a diagnostic, not an error
        ChainLine("leftover-vs-3alpha", abs(leftover_sum), 3 * a * n, False),
        ChainLine("diagonal-vs-alpha", n * math.sqrt(geom), a * n, False),
    ]
    if 0 < a < 1:
        chain.append(ChainLine("offdiagonal-vs-reference", off_sqrt,
                               math.sqrt(tau_eff * math.log(1 / a)) * n, False))
    diagnostics = {
        "sum_pair_abs": repr(sum_pair_abs),
        "sum_inner_abs": repr(sum_inner),
        "sum_cauchy": repr(sum_cauchy),
        "sum_extended": repr(sum_extended),
        "sum_bracket": repr(sum_bracket),
        "diagonal_aggregate": repr(diag_sqrt),
        "off_diagonal_aggregate": repr(off_sqrt),
        "geometric_tail": repr(geom),
    }
    return chain, diagnostics
