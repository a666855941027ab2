import unittest
import math

import numpy as np

import adelic_zeta
from adelic_zeta.lattice import MetrizedLattice
from adelic_zeta.cohomology import counts
from . import unittest_logging
from .tools import near_identity_generator, random_lattice_generator, random_place_matrices

THETA_Z = 1.0864348112133080


def theta_of_scaled_z(c, terms=200):
    """sum over m of exp(-pi c^2 m^2)"""
    return 1.0 + 2.0 * math.fsum(math.exp(-math.pi * c * c * m * m) for m in range(1, terms))


class TestH0H1(unittest.TestCase):
    def setUp(self):
        self.q = adelic_zeta.rationals()

    def test_integers(self):
        z = MetrizedLattice(self.q, 1, [[1.0]])
        self.assertAlmostEqual(adelic_zeta.h0(z), math.log(THETA_Z), delta=1e-14)
        self.assertAlmostEqual(adelic_zeta.h1(z), math.log(THETA_Z), delta=1e-14)
        self.assertAlmostEqual(adelic_zeta.h0(z), 0.0829015, places=7)

    def test_even_integers(self):
        two_z = MetrizedLattice(self.q, 1, [[2.0]])
        self.assertAlmostEqual(adelic_zeta.h0(two_z), math.log(theta_of_scaled_z(2.0)), delta=1e-14)
        # the dual of 2Z is Z/2
        self.assertAlmostEqual(adelic_zeta.h1(two_z), math.log(theta_of_scaled_z(0.5)), delta=1e-13)

    def test_h0_is_non_negative(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            lat = MetrizedLattice(self.q, 2, random_lattice_generator(rng, 2, -8, 8, 1.0))
            self.assertGreaterEqual(adelic_zeta.h0(lat), 0.0)

    def test_counts(self):
        lat = MetrizedLattice(self.q, 2, [[1.0, 0.0], [0.4, 1.5]])
        c = counts(lat)
        self.assertAlmostEqual(c.degree, -math.log(1.5), places=13)
        self.assertAlmostEqual(c.rr_rhs, c.degree, places=15)
        self.assertAlmostEqual(c.h0 - c.h1, c.rr_rhs, delta=1e-12)
        self.assertEqual(set(c.to_dict().keys()), {'h0', 'h1', 'degree', 'rr_rhs'})
        self.assertEqual(c.theta.count, lat.theta().count)

    def test_counts_number_field(self):
        f = adelic_zeta.builtin_field('Q(sqrt5)')
        c = counts(adelic_zeta.kappa_lattice(f))
        self.assertAlmostEqual(c.degree, math.log(5.0), places=12)
        self.assertAlmostEqual(c.rr_rhs, 0.5 * math.log(5.0), places=12)


class TestRiemannRoch(unittest.TestCase):
    def setUp(self):
        self.q = adelic_zeta.rationals()

    def assert_vanishes(self, residual, limit=1e-10):
        self.assertLessEqual(abs(residual.value), limit)
        self.assertTrue(residual.within_bound())
        self.assertLess(residual.bound, limit)

    def test_integers(self):
        self.assert_vanishes(adelic_zeta.rr_residual(MetrizedLattice(self.q, 1, [[1.0]])))

    def test_random_rank_three(self):
        rng = np.random.default_rng(3)
        for _ in range(5):
            lat = MetrizedLattice(self.q, 3, near_identity_generator(rng, 3) * float(rng.uniform(0.7, 1.4)))
            self.assert_vanishes(adelic_zeta.rr_residual(lat))

    def test_random_rank_four(self):
        rng = np.random.default_rng(8)
        for _ in range(3):
            lat = MetrizedLattice(self.q, 4, near_identity_generator(rng, 4, denominator=8.0))
            self.assert_vanishes(adelic_zeta.rr_residual(lat))

    def test_ring_of_integers(self):
        for name in ('Q(sqrt5)', 'Q(i)', 'Q(sqrt-3)', 'Q(sqrt2)'):
            lat = adelic_zeta.standard_lattice(adelic_zeta.builtin_field(name))
            self.assert_vanishes(adelic_zeta.rr_residual(lat))

    def test_rank_two_over_number_field(self):
        f = adelic_zeta.builtin_field('Q(i)')
        lat = adelic_zeta.adelic_lattice(f, [np.array([[1.0, 0.3 + 0.2j], [0.0, 1.5]])])
        self.assert_vanishes(adelic_zeta.rr_residual(lat))

        f = adelic_zeta.builtin_field('Q(sqrt5)')
        lat = adelic_zeta.adelic_lattice(f, [np.array([[1.0, 0.4], [0.0, 1.2]]), np.array([[0.8, 0.0], [-0.3, 1.1]])])
        self.assert_vanishes(adelic_zeta.rr_residual(lat))

    def test_residual_as_float_and_dict(self):
        r = adelic_zeta.rr_residual(MetrizedLattice(self.q, 1, [[1.3]]))
        self.assertEqual(float(r), r.value)
        self.assertEqual(r.to_dict(), {'residual': r.value, 'bound': r.bound})


class TestSerreDuality(unittest.TestCase):
    def setUp(self):
        self.q = adelic_zeta.rationals()

    def test_integers(self):
        r = adelic_zeta.serre_residual(MetrizedLattice(self.q, 1, [[1.0]]))
        self.assertLessEqual(abs(r.value), 1e-10)
        self.assertTrue(r.within_bound())

    def test_scaled_lattices(self):
        for c in (0.6, 1.0, 1.7):
            r = adelic_zeta.serre_residual(MetrizedLattice(self.q, 2, [[c, 0.0], [0.3 * c, c]]))
            self.assertLessEqual(abs(r.value), 1e-10)
            self.assertTrue(r.within_bound())

    def test_ring_of_integers(self):
        f = adelic_zeta.builtin_field('Q(sqrt5)')
        r = adelic_zeta.serre_residual(adelic_zeta.standard_lattice(f))
        self.assertLessEqual(abs(r.value), 1e-10)
        self.assertTrue(r.within_bound())


class TestRandomLattices(unittest.TestCase):
    # (field, rank, count)
    CASES = [('Q', 1, 35), ('Q', 2, 35), ('Q', 3, 35), ('Q', 4, 35),
             ('Q(i)', 1, 15), ('Q(i)', 2, 15), ('Q(sqrt5)', 1, 15), ('Q(sqrt5)', 2, 15)]

    def lattices(self):
        rng = np.random.default_rng(2024)
        for name, rank, count in self.CASES:
            field = adelic_zeta.rationals() if name == 'Q' else adelic_zeta.builtin_field(name)
            for i in range(count):
                yield name, rank, i, adelic_zeta.adelic_lattice(field, random_place_matrices(rng, field, rank))

    def test_riemann_roch_and_serre_duality(self):
        checked = 0
        for name, rank, i, lat in self.lattices():
            with self.subTest(field=name, rank=rank, i=i):
                rr = adelic_zeta.rr_residual(lat)
                self.assertLessEqual(abs(rr.value), 1e-10)
                self.assertTrue(rr.within_bound())
                serre = adelic_zeta.serre_residual(lat)
                self.assertLessEqual(abs(serre.value), 1e-10)
                self.assertTrue(serre.within_bound())
                checked += 1
        self.assertEqual(checked, 200)

    def test_dual_exchanges_h0_and_h1(self):
        for name, rank, i, lat in self.lattices():
            with self.subTest(field=name, rank=rank, i=i):
                self.assertEqual(adelic_zeta.h0(lat), adelic_zeta.h1(lat.dual()))
                self.assertEqual(adelic_zeta.h1(lat), adelic_zeta.h0(lat.dual()))
                self.assertGreaterEqual(adelic_zeta.h0(lat), 0.0)

    def test_twist_is_monotone(self):
        rng = np.random.default_rng(31)
        ts = (-0.6, -0.25, 0.0, 0.2, 0.7)
        for name, rank in (('Q', 2), ('Q', 3), ('Q(i)', 1), ('Q(sqrt5)', 2)):
            field = adelic_zeta.rationals() if name == 'Q' else adelic_zeta.builtin_field(name)
            lat = adelic_zeta.adelic_lattice(field, random_place_matrices(rng, field, rank))
            twists = [lat.bv_twist(t) for t in ts]
            thetas = [tw.theta().value for tw in twists]
            h0s = [adelic_zeta.h0(tw) for tw in twists]
            h1s = [adelic_zeta.h1(tw) for tw in twists]
            with self.subTest(field=name, rank=rank):
                for k in range(len(ts) - 1):
                    self.assertGreater(thetas[k], thetas[k + 1])
                    self.assertGreater(h0s[k], h0s[k + 1])
                    self.assertLess(h1s[k], h1s[k + 1])
