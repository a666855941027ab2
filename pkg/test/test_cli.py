import unittest
import os
import io
import json
import math
import logging
import tempfile
import contextlib
from unittest import mock

import numpy as np

from adelic_zeta.cli import main, parse_complex
from adelic_zeta.tools import LOGGER_NAME
from . import unittest_logging
from .tools import builtin_field_document, lattice_document, write_json


class CliTestCase(unittest.TestCase):
    def setUp(self):
        self.tmpdir = tempfile.TemporaryDirectory()
        self.dir = self.tmpdir.name

    def tearDown(self):
        self.tmpdir.cleanup()

    def run_cli(self, *argv):
        out = io.StringIO()
        err = io.StringIO()
        with contextlib.redirect_stderr(io.StringIO()):
            code = main(list(argv), stdout=out, stderr=err)
        return code, out.getvalue(), err.getvalue()

    def run_json(self, *argv):
        code, out, err = self.run_cli(*argv)
        self.assertEqual(code, 0, err)
        return [json.loads(line) for line in out.splitlines()]

    def assert_error(self, expected_code, *argv):
        code, out, err = self.run_cli(*argv)
        self.assertEqual(code, 1)
        self.assertEqual(out, '')
        data = json.loads(err)
        self.assertEqual(data['error'], expected_code)
        self.assertIn('message', data)
        return data

    def lattice_file(self, field, generator, name='lattice.json', rank=None):
        return write_json(self.dir, name, lattice_document(field, generator, rank))


class TestFieldCommands(CliTestCase):
    def test_check_builtin(self):
        rows = self.run_json('field', 'check', 'Q(sqrt5)')
        self.assertEqual(len(rows), 1)
        self.assertTrue(rows[0]['ok'])
        self.assertEqual(rows[0]['signature'], [2, 0])
        self.assertEqual(rows[0]['discriminant'], 5)
        self.assertEqual(rows[0]['class_number'], 1)

    def test_check_file(self):
        path = write_json(self.dir, 'gauss.json', builtin_field_document('qi.json'))
        rows = self.run_json('field', 'check', path)
        self.assertEqual(rows[0]['name'], 'gauss')
        self.assertEqual(rows[0]['roots_of_unity'], 4)

    def test_invalid_field(self):
        data = builtin_field_document('qi.json')
        data['discriminant'] = -8
        path = write_json(self.dir, 'bad.json', data)
        self.assert_error('field-invariant', 'field', 'check', path)

    def test_missing_file(self):
        self.assert_error('field-parse', 'field', 'check', os.path.join(self.dir, 'nothing.json'))


class TestCohomologyCommands(CliTestCase):
    def test_rr(self):
        path = self.lattice_file('Q', [[1.0, 0.0], [0.4, 1.5]])
        rows = self.run_json('cohom', 'rr', '--lattice', path)
        self.assertLessEqual(abs(rows[0]['residual']), 1e-10)
        self.assertIn('bound', rows[0])

    def test_serre_with_field_file(self):
        field_path = write_json(self.dir, 'sqrt5.json', builtin_field_document('q_sqrt5.json'))
        f_doc = builtin_field_document('q_sqrt5.json')
        path = self.lattice_file('sqrt5.json', f_doc['basis_embedding'], rank=1)
        self.assertTrue(os.path.exists(field_path))
        rows = self.run_json('cohom', 'serre', '--lattice', path)
        self.assertLessEqual(abs(rows[0]['residual']), 1e-10)

    def test_counts_csv(self):
        path = self.lattice_file('Q', [[2.0]])
        code, out, err = self.run_cli('cohom', 'counts', '--lattice', path, '--emit', 'csv')
        self.assertEqual(code, 0, err)
        lines = out.splitlines()
        self.assertEqual(lines[0], 'degree,h0,h1,rr_rhs')
        self.assertAlmostEqual(float(lines[1].split(',')[0]), -math.log(2.0), places=13)

    def test_bad_lattice(self):
        path = write_json(self.dir, 'lattice.json', {'field': 'Q', 'rank_over_field': 'two', 'generator': [['1']]})
        self.assert_error('lattice-parse', 'cohom', 'rr', '--lattice', path)

    def test_degenerate_lattice(self):
        path = self.lattice_file('Q', [[1.0, 2.0], [2.0, 4.0]])
        self.assert_error('degenerate-lattice', 'cohom', 'rr', '--lattice', path)


class TestStabilityCommands(CliTestCase):
    def test_unstable(self):
        path = self.lattice_file('Q', [[1.0, 0.0], [0.0, 4.0]])
        rows = self.run_json('stab', 'test', '--lattice', path)
        self.assertFalse(rows[0]['semistable'])
        self.assertFalse(rows[0]['stable'])
        self.assertTrue(rows[0]['certified'])
        self.assertEqual(rows[0]['certificate']['coefficients'], [[1, 0]])
        self.assertAlmostEqual(rows[0]['slope'], -math.log(2.0), places=13)

    def test_uncertified(self):
        path = self.lattice_file('Q', np.diag([1.0, 2.0, 3.0, 4.0]))
        self.assert_error('uncertified-rank', 'stab', 'test', '--lattice', path)
        rows = self.run_json('stab', 'test', '--lattice', path, '--allow-uncertified')
        self.assertFalse(rows[0]['certified'])

    def test_hn(self):
        path = self.lattice_file('Q', np.diag([1.0, 1.0, 8.0]))
        rows = self.run_json('stab', 'hn', '--lattice', path)
        self.assertEqual([s['rank'] for s in rows[0]['steps']], [2, 3])
        self.assertTrue(rows[0]['certified'])

    def test_not_a_module(self):
        path = self.lattice_file('Q(i)', [[1.0, 0.0], [0.3, 1.0]], rank=1)
        self.assert_error('not-a-module', 'stab', 'test', '--lattice', path)


class TestModuliCommands(CliTestCase):
    def test_volume(self):
        rows = self.run_json('moduli', 'volume', '--field', 'Q', '--rank', '2')
        self.assertEqual(rows[0]['chart'], 'rank2-Q-domain')
        self.assertAlmostEqual(rows[0]['volume'], math.pi / 3.0 - 1.0, places=15)
        self.assertAlmostEqual(rows[0]['quadrature_volume'], math.pi / 3.0 - 1.0, delta=1e-10)

    def test_volume_with_quadrature_file(self):
        spec = write_json(self.dir, 'quad.json', {'torus_points': 8})
        rows = self.run_json('moduli', 'volume', '--field', 'Q(sqrt2)', '--rank', '1', '--quadrature', spec)
        self.assertEqual(rows[0]['chart'], 'unit-torus-times-classgroup')
        self.assertAlmostEqual(rows[0]['quadrature_volume'], rows[0]['volume'], places=13)

    def test_bad_quadrature(self):
        spec = write_json(self.dir, 'quad.json', {'torus_points': 3})
        self.assert_error('invalid-parameter', 'moduli', 'volume', '--field', 'Q', '--rank', '1', '--quadrature', spec)

    def test_unsupported(self):
        self.assert_error('unsupported-moduli', 'moduli', 'volume', '--field', 'Q(i)', '--rank', '2')


class TestZetaCommands(CliTestCase):
    def test_eval_json(self):
        rows = self.run_json('zeta', 'eval', '--field', 'Q', '--rank', '1', '--s=2', '--s=0.5,1')
        self.assertEqual(len(rows), 2)
        self.assertEqual(rows[0]['s'], [2.0, 0.0])
        self.assertAlmostEqual(rows[0]['value'][0], math.pi / 6.0, delta=1e-9)
        self.assertEqual(rows[1]['s'], [0.5, 1.0])
        self.assertEqual(rows[1]['method'], 'continued')

    def test_eval_csv_both(self):
        code, out, err = self.run_cli('zeta', 'eval', '--field', 'Q', '--rank', '1', '--s=2', '--method', 'both', '--emit', 'csv')
        self.assertEqual(code, 0, err)
        lines = out.splitlines()
        self.assertEqual(lines[0], 's_re,s_im,val_re,val_im,err,method')
        self.assertEqual(len(lines), 3)
        self.assertEqual(lines[1].split(',')[-1], 'direct')
        self.assertEqual(lines[2].split(',')[-1], 'continued')
        for line in lines[1:]:
            self.assertAlmostEqual(float(line.split(',')[2]), math.pi / 6.0, delta=1e-8)

    def test_pole(self):
        self.assert_error('pole', 'zeta', 'eval', '--field', 'Q', '--rank', '1', '--s=1')

    def test_direct_out_of_domain(self):
        self.assert_error('zeta-domain', 'zeta', 'eval', '--field', 'Q', '--rank', '1', '--s=0.5', '--method', 'direct')

    def test_bad_parameters(self):
        self.assert_error('invalid-parameter', 'zeta', 'eval', '--field', 'Q', '--rank', '1', '--B', '0', '--s=2')

    def test_fescan(self):
        grid = write_json(self.dir, 'grid.json', [[0.3, 0.5], [2, 0], -0.7])
        rows = self.run_json('zeta', 'fescan', '--field', 'Q', '--rank', '1', '--grid', grid)
        self.assertEqual(rows[0]['points'], 3)
        self.assertEqual(rows[0]['path_points'], 1)
        self.assertLess(rows[0]['max_residual'], 1e-8)

    def test_bad_grid(self):
        grid = write_json(self.dir, 'grid.json', [[0.3, 0.5, 1.0]])
        self.assert_error('invalid-parameter', 'zeta', 'fescan', '--field', 'Q', '--rank', '1', '--grid', grid)

    def test_residues(self):
        rows = self.run_json('zeta', 'residues', '--field', 'Q', '--rank', '1')
        self.assertEqual(rows[0]['residues'], [-1.0, 1.0])
        self.assertAlmostEqual(rows[0]['fitted'][1][0], 1.0, delta=1e-8)

    def test_thread_setting(self):
        with mock.patch.dict(os.environ, {'ADELIC_ZETA_THREADS': 'abc'}):
            self.assert_error('invalid-parameter', 'zeta', 'eval', '--field', 'Q', '--rank', '1', '--s=2')
        with mock.patch.dict(os.environ, {'ADELIC_ZETA_THREADS': '1'}):
            rows = self.run_json('zeta', 'eval', '--field', 'Q', '--rank', '1', '--s=2', '--s=3')
            self.assertEqual(len(rows), 2)

    def test_output_independent_of_thread_count(self):
        argv = ('zeta', 'eval', '--field', 'Q(i)', '--rank', '1', '--method', 'both',
                '--s=2', '--s=2.5,1', '--s=3', '--s=4,-2', '--s=5', '--s=3.5')
        outputs = []
        for threads in ('1', '4', '1', '4'):
            with mock.patch.dict(os.environ, {'ADELIC_ZETA_THREADS': threads}):
                code, out, err = self.run_cli(*argv)
            self.assertEqual(code, 0, err)
            outputs.append(out)
        self.assertEqual(len(outputs[0].splitlines()), 12)
        for out in outputs[1:]:
            self.assertEqual(out, outputs[0])


class TestUsage(CliTestCase):
    def test_usage_error(self):
        code, out, err = self.run_cli('zeta', 'eval', '--field', 'Q')
        self.assertEqual(code, 2)
        self.assertEqual(out, '')

        code, _, _ = self.run_cli('nothing')
        self.assertEqual(code, 2)

    def test_parse_complex(self):
        self.assertEqual(parse_complex('2'), 2 + 0j)
        self.assertEqual(parse_complex('0.5,-14.1'), 0.5 - 14.1j)
        with self.assertRaises(Exception):
            parse_complex('1,2,3')

    def test_verbose_handler_is_removed(self):
        logger = logging.getLogger(LOGGER_NAME)
        before = list(logger.handlers)
        level = logger.level
        try:
            logger.setLevel(logging.WARNING)
            self.run_json('moduli', 'volume', '--field', 'Q', '--rank', '1', '-vv')
            self.assertEqual(logger.handlers, before)
            self.assertEqual(logger.level, logging.WARNING)
        finally:
            logger.setLevel(level)
