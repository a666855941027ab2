import unittest
import math

import numpy as np

import adelic_zeta
from adelic_zeta.moduli import ChartKind, QuadratureSpec, build_chart, fundamental_domain_lattice, degree_slice_iter
from adelic_zeta.numerics import ChartRule, quad_chart
from adelic_zeta.errors import ChartDomainError, UnsupportedModuliError
from . import unittest_logging

# integral of y dx dy / y^2 over the truncated fundamental domain
CHART_FIRST_MOMENT = 1.0 - 1.5 * math.log(1.5) - 0.5 * math.log(2.0)


class TestModuliVolume(unittest.TestCase):
    def test_rationals(self):
        q = adelic_zeta.rationals()
        self.assertEqual(adelic_zeta.moduli_volume(q, 1), 1.0)
        self.assertAlmostEqual(adelic_zeta.moduli_volume(q, 2), math.pi / 3.0 - 1.0, places=15)

    def test_rank_one_over_number_fields(self):
        phi = (1.0 + math.sqrt(5.0)) / 2.0
        expected = {
            'Q(i)': 0.25,
            'Q(sqrt-3)': 1.0 / 6.0,
            'Q(sqrt5)': 2.0 * math.log(phi),
            'Q(sqrt2)': 2.0 * math.log(1.0 + math.sqrt(2.0)),
        }
        for name, volume in expected.items():
            self.assertAlmostEqual(adelic_zeta.moduli_volume(adelic_zeta.builtin_field(name), 1), volume, places=12, msg=name)

    def test_unsupported(self):
        with self.assertRaises(UnsupportedModuliError) as ctx:
            adelic_zeta.moduli_volume(adelic_zeta.builtin_field('Q(i)'), 2)
        self.assertEqual(ctx.exception.code, 'unsupported-moduli')

        with self.assertRaises(UnsupportedModuliError):
            adelic_zeta.moduli_volume(adelic_zeta.rationals(), 3)

        with self.assertRaises(ValueError):
            build_chart(adelic_zeta.rationals(), 0)

    def test_chart_kinds(self):
        self.assertEqual(build_chart(adelic_zeta.rationals(), 1).kind, ChartKind.POINT)
        self.assertEqual(build_chart(adelic_zeta.builtin_field('Q(i)'), 1).kind, ChartKind.POINT)
        self.assertEqual(build_chart(adelic_zeta.builtin_field('Q(sqrt5)'), 1).kind, ChartKind.UNIT_TORUS)
        chart = build_chart(adelic_zeta.rationals(), 2)
        self.assertEqual(chart.kind, ChartKind.RANK2_Q)
        self.assertEqual(chart.dimension, 2)
        self.assertEqual(chart.lattice_dimension, 2)

    def test_charts_are_cached(self):
        q = adelic_zeta.rationals()
        self.assertIs(build_chart(q, 2), build_chart(q, 2))


class TestRankTwoChart(unittest.TestCase):
    def setUp(self):
        self.chart = build_chart(adelic_zeta.rationals(), 2)

    def test_quadrature_volume(self):
        self.assertAlmostEqual(self.chart.volume(), math.pi / 3.0 - 1.0, delta=1e-10)
        # the slice measure does not depend on the covolume
        self.assertAlmostEqual(self.chart.volume(covolume=5.0), self.chart.volume(), places=15)

    def test_quad_chart_gauss(self):
        result = quad_chart(lambda x, y: np.ones_like(x))
        self.assertAlmostEqual(result.value.real, math.pi / 3.0 - 1.0, delta=1e-11)

        result = quad_chart(lambda x, y: y)
        self.assertAlmostEqual(result.value.real, CHART_FIRST_MOMENT, delta=1e-10)
        self.assertAlmostEqual(CHART_FIRST_MOMENT, 0.0452287475, places=9)

    def test_quad_chart_monte_carlo(self):
        result = quad_chart(lambda x, y: np.ones_like(x), rule=ChartRule.MONTE_CARLO, points=1000000, seed=1)
        self.assertLess(abs(result.value.real - (math.pi / 3.0 - 1.0)), 4.0 * result.err)
        self.assertLess(result.err, 1e-3)

    def test_contains(self):
        self.assertTrue(self.chart.contains((0.0, 1.0)))
        self.assertTrue(self.chart.contains((0.5, math.sqrt(3.0) / 2.0)))
        self.assertTrue(self.chart.contains((-0.3, 0.97)))
        self.assertFalse(self.chart.contains((0.0, 0.9)))
        self.assertFalse(self.chart.contains((0.6, 1.0)))
        self.assertFalse(self.chart.contains((0.0, 1.1)))
        self.assertFalse(self.chart.contains((0.0,)))

    def test_to_lattice(self):
        x, y, V = 0.25, 0.99, 2.0
        lat = adelic_zeta.chart_to_lattice(self.chart, (x, y), V)
        gram = lat.generator @ lat.generator.T
        expected = (V / y) * np.array([[1.0, x], [x, x * x + y * y]])
        self.assertTrue(np.allclose(gram, expected, atol=1e-14))
        self.assertAlmostEqual(lat.covolume(), V, places=13)

    def test_to_lattice_outside(self):
        with self.assertRaises(ChartDomainError) as ctx:
            self.chart.to_lattice((0.7, 1.0))
        self.assertEqual(ctx.exception.code, 'chart-domain')
        with self.assertRaises(ChartDomainError):
            self.chart.to_lattice((0.0, 1.0), covolume=-1.0)

    def test_cusp_is_unstable(self):
        rng = np.random.default_rng(5)
        checked = 0
        for _ in range(1000):
            x = float(rng.uniform(-0.5, 0.5))
            y = float(rng.uniform(math.sqrt(1.0 - x * x), 2.0))
            if abs(y - 1.0) < 1e-6:
                continue
            lat = fundamental_domain_lattice(x, y)
            self.assertEqual(adelic_zeta.is_semistable(lat).holds, y <= 1.0, 'tau = %r + %ri' % (x, y))
            checked += 1
        self.assertGreater(checked, 950)

    def test_fundamental_domain_bounds(self):
        with self.assertRaises(ChartDomainError):
            fundamental_domain_lattice(0.0, 0.5)
        with self.assertRaises(ChartDomainError):
            fundamental_domain_lattice(0.7, 3.0)
        lat = fundamental_domain_lattice(0.1, 5.0, V=3.0)
        self.assertAlmostEqual(lat.covolume(), 3.0, places=13)

    def test_nodes(self):
        spec = QuadratureSpec(chart_points=8)
        nodes = self.chart.nodes(spec)
        fine = [n for n in nodes if n.weight > 0]
        coarse = [n for n in nodes if n.coarse_weight > 0]
        self.assertEqual(len(fine), 64)
        self.assertEqual(len(coarse), 16)
        for n in nodes:
            self.assertTrue(self.chart.contains(n.params))
            self.assertAlmostEqual(n.lattice.covolume(), 1.0, places=13)
        self.assertIs(self.chart.nodes(spec), nodes)


class TestTorusChart(unittest.TestCase):
    def test_real_quadratic_nodes(self):
        f = adelic_zeta.builtin_field('Q(sqrt5)')
        chart = build_chart(f, 1)
        nodes = chart.nodes()
        self.assertEqual(len(nodes), 16)
        self.assertAlmostEqual(math.fsum(n.weight for n in nodes), adelic_zeta.moduli_volume(f, 1), places=14)
        self.assertAlmostEqual(math.fsum(n.coarse_weight for n in nodes), adelic_zeta.moduli_volume(f, 1), places=14)
        for n in nodes:
            self.assertAlmostEqual(n.lattice.covolume(), 1.0, places=12)
            self.assertTrue(chart.contains(n.params))

    def test_point_chart(self):
        f = adelic_zeta.builtin_field('Q(i)')
        chart = build_chart(f, 1)
        nodes = chart.nodes()
        self.assertEqual(len(nodes), 1)
        self.assertEqual(nodes[0].weight, 0.25)
        self.assertEqual(chart.volume(), 0.25)

    def test_to_lattice(self):
        f = adelic_zeta.builtin_field('Q(sqrt2)')
        chart = build_chart(f, 1)
        lat = chart.to_lattice((0, 0.3), covolume=4.0)
        self.assertAlmostEqual(lat.covolume(), 4.0, places=12)
        with self.assertRaises(ChartDomainError):
            chart.to_lattice((1, 0.3))
        with self.assertRaises(ChartDomainError):
            chart.to_lattice((0, 1.5))


class TestDegreeSlices(unittest.TestCase):
    def test_weights_integrate_dv_over_v(self):
        q = adelic_zeta.rationals()
        chart = build_chart(q, 1)
        samples = list(degree_slice_iter(chart, (1.0, math.e)))
        self.assertEqual(len(samples), 4 * 12)
        self.assertAlmostEqual(math.fsum(w for _, w in samples), 1.0, places=13)

    def test_covolumes_follow_the_slices(self):
        chart = build_chart(adelic_zeta.rationals(), 2)
        spec = QuadratureSpec(chart_points=4, v_panels=2)
        total = 0.0
        for lat, w in degree_slice_iter(chart, (0.5, 8.0), spec):
            self.assertTrue(0.5 <= lat.covolume() <= 8.0)
            total += w
        self.assertAlmostEqual(total, chart.volume(spec=spec) * math.log(16.0), places=12)

    def test_infinite_upper_end(self):
        chart = build_chart(adelic_zeta.builtin_field('Q(sqrt5)'), 1)
        spec = QuadratureSpec(v_max=100.0)
        total = math.fsum(w for _, w in degree_slice_iter(chart, (1.0, math.inf), spec))
        self.assertAlmostEqual(total, chart.total_volume * math.log(100.0), places=12)

    def test_infinite_upper_end_is_logged(self):
        chart = build_chart(adelic_zeta.rationals(), 1)
        chart.logger.disabled = False
        try:
            with self.assertLogs(chart.logger, level='DEBUG') as logs:
                samples = list(degree_slice_iter(chart, (1.0, math.inf)))
        finally:
            chart.logger.disabled = unittest_logging.logger.disabled
        self.assertTrue(any('V=1e+06' in line for line in logs.output))
        self.assertAlmostEqual(math.fsum(w for _, w in samples), math.log(1e6), places=10)

    def test_bad_range(self):
        chart = build_chart(adelic_zeta.rationals(), 1)
        with self.assertRaises(ChartDomainError):
            list(degree_slice_iter(chart, (0.0, 1.0)))
        self.assertEqual(list(degree_slice_iter(chart, (2.0, 1.0))), [])


class TestQuadratureSpec(unittest.TestCase):
    def test_defaults(self):
        spec = QuadratureSpec()
        self.assertEqual(spec.v_panels, 4)
        self.assertEqual(spec.chart_rule, ChartRule.GAUSS_LEGENDRE)
        self.assertIsNone(spec.v_max)
        self.assertNotIn('logger_name', spec.to_dict())

    def test_validation(self):
        with self.assertRaises(ValueError):
            QuadratureSpec(v_panels=0)
        with self.assertRaises(ValueError):
            QuadratureSpec(chart_points=3)
        with self.assertRaises(ValueError):
            QuadratureSpec(chart_rule='simpson')
        with self.assertRaises(ValueError):
            QuadratureSpec(v_max=1.0)
        with self.assertRaises(ValueError):
            QuadratureSpec(torus_points=True)
        with self.assertRaises(ValueError):
            QuadratureSpec(unknown=1)
        QuadratureSpec(chart_rule=ChartRule.MONTE_CARLO, chart_points=1001)

        spec = QuadratureSpec()
        with self.assertRaises(ValueError):
            spec.set('seed', -1)

    def test_from_dict(self):
        spec = QuadratureSpec.from_dict({'v_max': '50', 'v_panels': 6})
        self.assertEqual(spec.v_max, 50.0)
        self.assertEqual(spec.v_panels, 6)
        self.assertEqual(QuadratureSpec.from_dict(spec.to_dict()).key(), spec.key())
        with self.assertRaises(ValueError):
            QuadratureSpec.from_dict([1, 2])
