import cmath
import math
from fractions import Fraction

import numpy as np
import pytest

from horomu.arith import sieve_mobius
from horomu.criterion import (BoundedSequence, bilinear_sum, criterion_ledger,
                              tau_estimate, vinogradov_bound, weighted_sum)
from horomu.errors import (DomainError, EmptyPairSetError, HorizonError,
                           ValidationError)
from horomu.exactreal import frac_parts

from conftest import mobius_oracle


def closed_form_magnitude(theta_name: str, delta: int, M: int) -> float:
    """|sin(pi M delta theta) / sin(pi delta theta)| via the shared exact angles."""
    f_md = frac_parts(theta_name, np.array([M * delta]))[0]
    f_d = frac_parts(theta_name, np.array([delta]))[0]
    return abs(math.sin(math.pi * f_md) / math.sin(math.pi * f_d))


@pytest.fixture(scope="module")
def exp_sqrt2_40k():
    return BoundedSequence.exponential("sqrt2", 40_000)


class TestBoundedSequence:
    def test_bound_enforced(self):
        with pytest.raises(ValidationError):
            BoundedSequence.constant(1.5, 10)

    def test_exponential_is_unimodular(self, exp_sqrt2_40k):
        mags = np.abs(exp_sqrt2_40k.values[1:100])
        assert np.allclose(mags, 1.0, atol=1e-14)

    def test_eval_and_horizon(self, exp_sqrt2_40k):
        v = exp_sqrt2_40k.eval(7)
        expect = cmath.exp(2j * math.pi * frac_parts("sqrt2", np.array([7]))[0])
        assert abs(v - expect) < 1e-15
        with pytest.raises(HorizonError):
            exp_sqrt2_40k.eval(40_001)


class TestBilinearSum:
    def test_constant_sequence(self):
        F = BoundedSequence.constant(1, 1000)
        pc = bilinear_sum(F, 2, 3, 100)
        assert pc.total == 100 + 0j and pc.normalized == 1.0

    def test_geometric_closed_form(self, exp_sqrt2_40k):
        pc = bilinear_sum(exp_sqrt2_40k, 2, 3, 10_000)
        expect = closed_form_magnitude("sqrt2", 1, 10_000)
        assert abs(abs(pc.total) - expect) <= 1e-9 * expect

    def test_mobius_double_loop(self, mobius_1k):
        mu = sieve_mobius(3000)
        F = BoundedSequence.from_multiplicative(mu)
        pc = bilinear_sum(F, 2, 3, 1000)
        brute = sum(mobius_oracle(2 * m) * mobius_oracle(3 * m)
                    for m in range(1, 1001))
        assert pc.total == pytest.approx(brute, abs=1e-12)

    def test_swap_symmetry(self, exp_sqrt2_40k):
        a = bilinear_sum(exp_sqrt2_40k, 5, 7, 2000)
        b = bilinear_sum(exp_sqrt2_40k, 7, 5, 2000)
        assert a.total == pytest.approx(b.total.conjugate(), rel=1e-12)
        assert a.normalized == pytest.approx(b.normalized, rel=1e-12)

    def test_phase_scaling_invariance(self, exp_sqrt2_40k, mobius_1k):
        c = cmath.exp(0.739j)
        G = BoundedSequence(exp_sqrt2_40k.values * c, "scaled")
        a = bilinear_sum(exp_sqrt2_40k, 2, 5, 3000)
        b = bilinear_sum(G, 2, 5, 3000)
        assert a.normalized == pytest.approx(b.normalized, rel=1e-12)
        wa = abs(weighted_sum(mobius_1k, exp_sqrt2_40k, 1000))
        wb = abs(weighted_sum(mobius_1k, G, 1000))
        assert wa == pytest.approx(wb, rel=1e-12)

    def test_horizon_error(self, exp_sqrt2_40k):
        with pytest.raises(HorizonError):
            bilinear_sum(exp_sqrt2_40k, 2, 3, 20_000)


class TestTauEstimate:
    def test_constant_single_pair(self):
        F = BoundedSequence.constant(1, 100)
        est = tau_estimate(F, 3)
        assert est.tau_hat == 1.0 and est.worst_pair == (2, 3)

    def test_exclusion_monotone(self, exp_sqrt2_40k):
        full = tau_estimate(exp_sqrt2_40k, 20)
        pruned = tau_estimate(exp_sqrt2_40k, 20, excluded=[full.worst_pair])
        assert pruned.tau_hat <= full.tau_hat
        assert pruned.worst_pair != full.worst_pair
        assert pruned.excluded == [tuple(sorted(full.worst_pair))]

    def test_superset_monotonicity(self, exp_sqrt2_40k):
        small = tau_estimate(exp_sqrt2_40k, 13)
        large = tau_estimate(exp_sqrt2_40k, 20)
        assert large.tau_hat >= small.tau_hat - 1e-15

    def test_closed_form_per_pair(self, exp_sqrt2_40k):
        est = tau_estimate(exp_sqrt2_40k, 20)
        for pc in est.pairs:
            expect = closed_form_magnitude("sqrt2", pc.p2 - pc.p1, pc.m) / pc.m
            assert abs(pc.normalized - expect) <= 1e-9 * expect, (pc.p1, pc.p2)

    def test_threaded_matches_serial(self, exp_sqrt2_40k):
        serial = tau_estimate(exp_sqrt2_40k, 20)
        threaded = tau_estimate(exp_sqrt2_40k, 20, threads=4)
        assert serial.tau_hat == threaded.tau_hat
        assert [p.as_dict() for p in serial.pairs] == \
               [p.as_dict() for p in threaded.pairs]

    def test_window_caps_pair_length(self, exp_sqrt2_40k):
        est = tau_estimate(exp_sqrt2_40k, 10, window=10_000)
        for pc in est.pairs:
            assert pc.m == 10_000 // max(pc.p1, pc.p2)

    def test_empty_cutoff(self):
        F = BoundedSequence.constant(1, 100)
        with pytest.raises(EmptyPairSetError):
            tau_estimate(F, 2)


class TestVinogradovBound:
    def test_reference_values(self):
        assert vinogradov_bound(1 / math.e, 1) == pytest.approx(2 / math.sqrt(math.e),
                                                                rel=1e-12)
        assert vinogradov_bound(0.01, 10 ** 6) == pytest.approx(429193.20525786944,
                                                                rel=1e-12)

    def test_monotone_below_inverse_e(self):
        taus = [0.3, 0.2, 0.1, 0.03, 0.01, 0.001]
        vals = [vinogradov_bound(t, 1) for t in taus]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_domain_errors(self):
        for bad in (0.0, 1.0, 1.5, -0.1):
            with pytest.raises(DomainError):
                vinogradov_bound(bad, 10)


class TestWeightedSum:
    def test_mertens(self, mobius_1k):
        F = BoundedSequence.constant(1, 100)
        assert weighted_sum(mobius_1k, F, 100) == 1 + 0j

    def test_squarefree_count(self, mobius_1k):
        F = BoundedSequence.from_multiplicative(sieve_mobius(100))
        assert weighted_sum(mobius_1k, F, 100) == 61 + 0j

    def test_zero_sequence(self, mobius_1k):
        F = BoundedSequence.constant(0, 100)
        assert weighted_sum(mobius_1k, F, 100) == 0j

    def test_horizon_checks(self, mobius_1k):
        F = BoundedSequence.constant(1, 50)
        with pytest.raises(HorizonError):
            weighted_sum(mobius_1k, F, 100)


LEDGER_N = 10 ** 4


@pytest.fixture(scope="module")
def ledger():
    horizon = int(math.ceil(1.3 * LEDGER_N))
    mu = sieve_mobius(horizon)
    F = BoundedSequence.exponential("sqrt2", horizon)
    return criterion_ledger(mu, F, LEDGER_N, Fraction(3, 10), 5, 12, cutoff=20)


class TestLedger:
    N = LEDGER_N

    def test_exact_chain_holds(self, ledger):
        for line in ledger.chain:
            if line.exact:
                assert line.holds, line

    def test_ledger_path_equals_direct(self, ledger):
        horizon = int(math.ceil(1.3 * self.N))
        mu = sieve_mobius(horizon)
        F = BoundedSequence.exponential("sqrt2", horizon)
        direct = weighted_sum(mu, F, self.N - 1)
        via_ledger = sum(b.pair_sum for b in ledger.blocks) + ledger.leftover_sum
        assert abs(direct - via_ledger) <= 1e-9 * max(1.0, abs(direct))

    def test_factored_identity_per_block(self, ledger):
        for b in ledger.blocks:
            assert b.pair_sum == pytest.approx(b.factored_sum, abs=1e-9)

    def test_tau_effective_floor(self, ledger):
        assert ledger.tau_effective == pytest.approx(
            max(ledger.tau.tau_hat, 1 / math.log(20)), rel=1e-12)

    def test_constant_sequence_closed_form(self, mobius_1k):
        # with F = 1 the inner sums collapse: T_j = |P_j| * |Q_j|
        N = 500
        mu = sieve_mobius(int(math.ceil(1.3 * N)))
        F = BoundedSequence.constant(1, int(math.ceil(1.3 * N)))
        rep = criterion_ledger(mu, F, N, Fraction(3, 10), 4, 10, cutoff=10)
        for b in rep.blocks:
            assert b.inner_abs == pytest.approx(b.p_count * b.q_count, rel=1e-12)

    def test_single_block_degenerate(self):
        # j1 = j0 + 1 keeps exactly one block; ledger equals direct computation
        N = 2000
        horizon = int(math.ceil(1.3 * N))
        mu = sieve_mobius(horizon)
        F = BoundedSequence.exponential("sqrt2", horizon)
        rep = criterion_ledger(mu, F, N, Fraction(3, 10), 6, 7, cutoff=10)
        assert len(rep.blocks) == 1
        b = rep.blocks[0]
        direct = sum(mu.value(n) * F.eval(n)
                     for n in np.nonzero(rep_members(rep))[0])
        assert b.pair_sum == pytest.approx(direct, abs=1e-9)

    def test_horizon_requirement(self):
        mu = sieve_mobius(self.N)
        F = BoundedSequence.exponential("sqrt2", self.N)  # too short
        with pytest.raises(HorizonError):
            criterion_ledger(mu, F, self.N, Fraction(3, 10), 5, 12, cutoff=20)

    def test_verdict_fields(self, ledger):
        assert ledger.verdict in ("holds", "fails", "inconclusive")
        assert ledger.bound_rhs >= 0
        assert 0 < ledger.tau_effective <= 1
        assert abs(ledger.weighted) <= self.N


def rep_members(rep):
    """Mask of [0, N) marked as product members, rebuilt from the report."""
    from horomu.arith import sieve_primes
    from horomu.decomp import build_decomposition
    primes = sieve_primes(int(math.ceil(float(rep.params.d1))) + 1)
    dec = build_decomposition(rep.params, primes)
    return dec.in_pq
