import math
import random
from fractions import Fraction

import numpy as np
import pytest
from mpmath import mp

from horomu.arith import sieve_mobius
from horomu.dynamics import (FundamentalDomainCoords, ModularPoint,
                             OrbitEvaluator, QuadratureSpec, birkhoff_average,
                             bump_observable, const_observable, domain_mass,
                             genericity, haar_mean, horocycle_point,
                             mobius_disjointness_sum, orbit_sequence,
                             pair_correlation, reduce, split_observable,
                             step_observable, windy_observable)
from horomu.errors import (ConvergenceError, DescriptorError, PrecisionError,
                           ValidationError)
from horomu.exactreal import SymbolicReal

from conftest import TEST_SEED, reduce_oracle

SMALL_QUAD = QuadratureSpec(y_max=1000.0, nx=500, nv=500, ntheta=32)


class TestReduce:
    def test_translation_example(self):
        c = reduce(1 + 1j)
        assert (c.x, c.y) == (0.0, 1.0)
        assert c.gamma == ((1, -1), (0, 1))

    def test_identity_example(self):
        c = reduce(1j)
        assert (c.x, c.y) == (0.0, 1.0) and c.gamma == ((1, 0), (0, 1))

    def test_against_exact_oracle(self):
        rng = random.Random(TEST_SEED)
        for _ in range(100):
            xr = Fraction(rng.randint(-400, 400), rng.randint(1, 97))
            yr = Fraction(rng.randint(1, 300), rng.randint(1, 97))
            ox, oy, og = reduce_oracle(xr, yr)
            got = reduce((xr, yr))
            assert got.gamma == og
            assert abs(got.x - float(ox)) < 1e-10
            assert abs(got.y - float(oy)) < 1e-10

    def test_gamma_integral_and_unimodular(self):
        rng = random.Random(TEST_SEED + 1)
        for _ in range(500):
            z = complex(rng.uniform(-8, 8), rng.uniform(1e-3, 4.0))
            c = reduce(z)
            assert c.gamma_det() == 1
            assert all(isinstance(v, int) for row in c.gamma for v in row)
            assert -0.5 <= c.x < 0.5
            assert c.x * c.x + c.y * c.y >= 1 - 1e-12

    def test_idempotent(self):
        rng = random.Random(TEST_SEED + 2)
        for _ in range(300):
            z = complex(rng.uniform(-8, 8), rng.uniform(1e-3, 4.0))
            first = reduce(z)
            again = reduce(first.point)
            assert again.gamma == ((1, 0), (0, 1))

    def test_gamma_maps_input_to_output(self):
        rng = random.Random(TEST_SEED + 3)
        for _ in range(100):
            z = complex(rng.uniform(-5, 5), rng.uniform(0.05, 3.0))
            c = reduce(z)
            (a, b), (cc, d) = c.gamma
            image = (a * z + b) / (cc * z + d)
            assert abs(image - c.point) < 1e-12

    def test_rejects_lower_half_plane(self):
        with pytest.raises(ValidationError):
            reduce(1 - 1j)

    def test_precision_floor(self):
        with pytest.raises(PrecisionError):
            reduce((0.3, 1e-30), precision_bits=64)


class TestModularPoint:
    def test_det_validation(self):
        with pytest.raises(ValidationError):
            ModularPoint(2, 0, 0, 1)

    def test_mixed_symbols_rejected(self):
        with pytest.raises(DescriptorError):
            ModularPoint(SymbolicReal.const("e"), 0, SymbolicReal.const("pi"), 1)

    def test_cusp_direction_variants(self):
        assert ModularPoint.identity().cusp_direction() == "infinity"
        assert ModularPoint.from_rationals(3, Fraction(1, 2), 4, 1) \
            .cusp_direction() == Fraction(3, 4)
        xi = ModularPoint.lower("inv_e")
        assert genericity(xi).generic

    def test_rational_ratio_with_symbolic_entries(self):
        xi = ModularPoint(SymbolicReal.parse("sqrt2"), SymbolicReal.parse("1/4*sqrt2"),
                          SymbolicReal.parse("2*sqrt2"), SymbolicReal.parse("sqrt2"))
        g = genericity(xi)
        assert not g.generic and g.cusp_direction == Fraction(1, 2)

    def test_nongeneric_examples(self):
        assert not genericity(ModularPoint.identity()).generic
        g = genericity(ModularPoint.from_rationals(3, Fraction(1, 2), 4, 1))
        assert g.cusp_direction == Fraction(3, 4)

    def test_unknown_symbol_rejected(self):
        with pytest.raises(DescriptorError):
            ModularPoint.lower("feigenbaum")


class TestHorocyclePoint:
    def test_integral_point_is_fixed(self):
        ident = ModularPoint.identity()
        for n in (0, 1, 7, 1000, 10 ** 6):
            c = horocycle_point(ident, n)
            assert (c.x, c.y, c.theta) == (0.0, 1.0, 0.0)

    def test_other_integral_matrix_fixed(self):
        xi = ModularPoint.from_rationals(2, 1, 1, 1)
        base = horocycle_point(xi, 0)
        for n in (1, 13, 999):
            c = horocycle_point(xi, n)
            assert abs(c.x - base.x) < 1e-12 and abs(c.y - base.y) < 1e-12

    def test_against_high_precision_oracle(self):
        # independent evaluation at 256-bit mpmath + exact-rational reduction
        xi = ModularPoint.lower(Fraction(3, 7))
        for n in (1, 2, 17, 1234):
            got = horocycle_point(xi, n)
            t = Fraction(3, 7)
            den = (t * n + 1) ** 2 + t * t
            zx = Fraction((t * n + 1) * n + t, 1) / den
            zy = Fraction(1, 1) / den
            ox, oy, og = reduce_oracle(zx, zy)
            assert got.gamma == og, n
            assert abs(got.x - float(ox)) < 1e-12
            assert abs(got.y - float(oy)) < 1e-12

    def test_symbolic_point_against_mpmath(self):
        xi = ModularPoint.lower("inv_e")
        mp.prec = 256
        t = 1 / mp.e
        for n in (1, 5, 100, 4321):
            w = (mp.mpf(n) + mp.mpc(0, 1)) / (t * (mp.mpf(n) + mp.mpc(0, 1)) + 1)
            got = horocycle_point(xi, n)
            # reduce the mpmath point with the exact-rational oracle
            zx = Fraction(str(mp.nstr(w.real, 50)))
            zy = Fraction(str(mp.nstr(w.imag, 50)))
            ox, oy, og = reduce_oracle(zx, zy)
            assert got.gamma == og, n
            assert abs(got.x - float(ox)) < 1e-10
            assert abs(got.y - float(oy)) < 1e-10

    def test_orbit_consistency(self):
        xi = ModularPoint.lower("inv_e")
        rng = random.Random(TEST_SEED)
        for _ in range(20):
            m = rng.randint(0, 1000)
            n = rng.randint(0, 1000)
            a = horocycle_point(xi, m + n)
            b = horocycle_point(xi.times_u(m), n)
            assert abs(a.x - b.x) < 1e-11 and abs(a.y - b.y) < 1e-11
            assert abs(a.theta - b.theta) < 1e-11

    def test_warm_start_matches_cold(self):
        xi = ModularPoint.lower("inv_e")
        ev = OrbitEvaluator(xi, 5000)
        for n in (1, 2, 3, 50, 333, 4999):
            warm = ev.coords(n)
            cold = horocycle_point(xi, n)
            assert abs(warm.x - cold.x) < 1e-12
            assert abs(warm.y - cold.y) < 1e-12
            assert warm.gamma == cold.gamma
            assert abs(warm.theta - cold.theta) < 1e-12

    def test_unimodularity_along_orbit(self):
        xi = ModularPoint.lower("inv_e")
        for n in (1, 10, 100):
            c = horocycle_point(xi, n)
            assert c.gamma_det() == 1

    def test_evaluator_requires_ascending(self):
        ev = OrbitEvaluator(ModularPoint.identity(), 100)
        ev.coords(10)
        with pytest.raises(ValidationError):
            ev.coords(5)


class TestObservables:
    def test_cusp_continuity(self):
        for f in (bump_observable(2, 0.5), step_observable(2, 0.25),
                  const_observable(0.7)):
            ys = np.array([1e4, 1e5, 1e6])
            vals = np.asarray(f.eval(np.zeros(3), ys), float)
            assert np.all(np.abs(vals - f.cusp_limit) < 1e-6), f.label

    def test_bounds(self):
        f = bump_observable(2, 0.5)
        ys = np.exp(np.linspace(-1, 8, 200))
        vals = np.asarray(f.eval(np.zeros_like(ys), ys), float)
        assert np.all(np.abs(vals) <= 1.0)

    def test_frame_requires_theta(self):
        w = windy_observable()
        with pytest.raises(ValidationError):
            w.eval(0.0, 2.0)


class TestHaar:
    def test_domain_mass_is_pi_over_3(self):
        mass = domain_mass()
        assert abs(mass - math.pi / 3) / (math.pi / 3) < 1e-5

    def test_mean_of_one(self):
        assert haar_mean(const_observable(1.0)) == pytest.approx(1.0, abs=1e-10)

    def test_bump_mean_against_1d_reduction(self):
        # K-invariant f(y): reduce to the 1d integral of f(y) w(y) / y^2 with
        # w(y) the domain width at height y
        from scipy.integrate import quad
        y0, wid = 2.0, 0.5
        f = bump_observable(y0, wid)

        def density(y):
            if y < math.sqrt(3) / 2:
                return 0.0
            width = 1.0 if y >= 1.0 else 1.0 - 2.0 * math.sqrt(1.0 - y * y)
            return math.exp(-((math.log(y / y0) / wid) ** 2)) * width / (y * y)

        total, _ = quad(density, math.sqrt(3) / 2, 1.0, limit=200)
        upper, _ = quad(density, 1.0, 200.0, limit=400)
        expect = (total + upper) / (math.pi / 3)
        got = haar_mean(f)
        assert got == pytest.approx(expect, rel=1e-5)

    def test_step_mean_against_1d_reduction(self):
        from scipy.integrate import quad
        f = step_observable(2.0, 0.25)

        def density(y):
            width = 1.0 if y >= 1.0 else 1.0 - 2.0 * math.sqrt(1.0 - y * y)
            return width / ((1.0 + math.exp(-(y - 2.0) / 0.25)) * y * y)

        lower, _ = quad(density, math.sqrt(3) / 2, 1.0, limit=200)
        mid, _ = quad(density, 1.0, 1000.0, limit=1000)
        tail = 1.0 / 1000.0  # f ~ 1 beyond the truncation
        expect = (lower + mid + tail) / (math.pi / 3)
        assert haar_mean(f) == pytest.approx(expect, rel=1e-4)

    def test_frame_average_kills_rotation_factor(self):
        assert haar_mean(windy_observable(), SMALL_QUAD) == pytest.approx(0.0,
                                                                          abs=1e-12)

    def test_split_recentres(self):
        f1, c = split_observable(bump_observable(2, 0.5))
        assert abs(haar_mean(f1)) < 1e-6
        assert f1.cusp_limit == pytest.approx(-c)

    def test_split_of_constant(self):
        f1, c = split_observable(const_observable(1.0))
        assert c == pytest.approx(1.0, abs=1e-10)
        assert abs(float(f1.eval(0.0, 2.0))) < 1e-10

    def test_cusp_divergence_detected(self):
        # a declared-wrong cusp limit must raise, not silently integrate
        from horomu.dynamics import Observable
        bad = Observable("bad", "k_invariant",
                         lambda x, y: np.minimum(1.0, 0.5 * np.log(y) / np.log(1e3)),
                         cusp_limit=0.0)
        with pytest.raises(ConvergenceError):
            haar_mean(bad)


class TestAveragesAndCorrelations:
    def test_birkhoff_of_one(self):
        assert birkhoff_average(const_observable(1.0),
                                ModularPoint.identity(), 997) == 1.0

    def test_fixed_orbit_value(self):
        f = bump_observable(2, 0.5)
        base = float(f.eval(0.0, 1.0))
        got = birkhoff_average(f, ModularPoint.identity(), 57)
        assert got == pytest.approx(base, rel=5e-16)

    def test_fixed_orbit_correlation(self):
        f = bump_observable(2, 0.5)
        base = float(f.eval(0.0, 1.0))
        est = pair_correlation(f, ModularPoint.identity(), 2, 3, 1000)
        assert est.value == pytest.approx(base * base, rel=5e-16)

    def test_constant_observable_correlation(self):
        est = pair_correlation(const_observable(1.0), ModularPoint.identity(),
                               2, 3, 100)
        assert est.value == 1.0 and est.target == 1.0 and est.gap == 0.0

    def test_correlation_bound(self):
        f = bump_observable(2, 0.5)
        xi = ModularPoint.lower("inv_e")
        est = pair_correlation(f, xi, 2, 3, 2000, quad=SMALL_QUAD)
        assert abs(est.value) <= 1.0 + 1e-12

    def test_birkhoff_approaches_haar(self):
        f = bump_observable(2, 0.5)
        xi = ModularPoint.lower("inv_e")
        c = haar_mean(f)
        got = birkhoff_average(f, xi, 20_000)
        assert abs(got - c) < 0.01

    def test_validation(self):
        f = bump_observable(2, 0.5)
        with pytest.raises(ValidationError):
            pair_correlation(f, ModularPoint.identity(), 3, 3, 100)


class TestDisjointness:
    def test_constant_observable_is_mertens_ratio(self, mobius_1k):
        rep = mobius_disjointness_sum(ModularPoint.identity(),
                                      const_observable(1.0), 100, mobius_1k)
        row = rep.row(100)
        assert row.average == pytest.approx(0.01, rel=1e-14)
        assert row.nu_mean == pytest.approx(0.01, rel=1e-14)

    def test_fixed_orbit_scales_mertens(self, mobius_1k):
        f = bump_observable(2, 0.5)
        base = float(f.eval(0.0, 1.0))
        rep = mobius_disjointness_sum(ModularPoint.identity(), f, 1000, mobius_1k)
        for row in rep.rows:
            mertens = int(mobius_1k.values[1:row.n + 1].sum())
            assert row.average == pytest.approx(base * mertens / row.n, rel=1e-12,
                                                abs=1e-15)

    def test_ladder_defaults(self, mobius_1k):
        rep = mobius_disjointness_sum(ModularPoint.identity(),
                                      const_observable(1.0), 1000, mobius_1k)
        assert [r.n for r in rep.rows] == [100, 1000]

    def test_bad_ladder(self, mobius_1k):
        with pytest.raises(ValidationError):
            mobius_disjointness_sum(ModularPoint.identity(), const_observable(1.0),
                                    100, mobius_1k, ladder=[5000])


class TestOrbitSequence:
    def test_bridges_to_bounded_sequence(self):
        f = bump_observable(2, 0.5)
        xi = ModularPoint.lower("inv_e")
        F = orbit_sequence(xi, f, 500)
        assert F.horizon == 500
        c = horocycle_point(xi, 123, need_theta=False)
        assert F.eval(123) == pytest.approx(complex(float(f.eval(c.x, c.y))),
                                            rel=1e-12)
