import unittest
import os
import time
from unittest import mock

import numpy as np

from adelic_zeta.tools import Timer, complex_fsum, parse_decimal, parse_matrix, thread_cap, THREADS_ENV_VAR
from . import unittest_logging


class TestTimer(unittest.TestCase):
    def test_timer(self):
        t = Timer()
        self.assertEqual(t.elapsed(), 0)
        self.assertIs(t.start(), t)
        time.sleep(0.02)
        self.assertGreater(t.elapsed(), 0.01)
        self.assertGreater(t.elapsed_ns(), 10000000)


class TestCompensatedSum(unittest.TestCase):
    def test_cancellation(self):
        self.assertEqual(complex_fsum([1e16, 1.0, -1e16]), 1.0 + 0j)
        self.assertEqual(complex_fsum([1e16j, 1j, -1e16j, 2.0]), 2.0 + 1j)
        self.assertEqual(complex_fsum([]), 0j)


class TestDecimalParsing(unittest.TestCase):
    def test_decimal_strings(self):
        self.assertEqual(parse_decimal('1.5', 'x'), 1.5)
        self.assertEqual(parse_decimal(' -2e-3 ', 'x'), -0.002)
        self.assertEqual(parse_decimal(3, 'x'), 3.0)
        self.assertEqual(parse_decimal('0.70710678118654752440084436210484903928', 'x'), 0.7071067811865476)

    def test_rejects(self):
        for bad in ('abc', '', 'nan', 'inf', True, None, [1.0], float('inf')):
            with self.assertRaises(ValueError, msg=repr(bad)):
                parse_decimal(bad, 'x')

    def test_matrix(self):
        m = parse_matrix([['1', '0'], ['0.5', 2]], 'g', nrows=2, ncols=2)
        self.assertTrue(np.array_equal(m, [[1.0, 0.0], [0.5, 2.0]]))
        self.assertEqual(m.dtype, np.float64)

    def test_bad_matrix(self):
        with self.assertRaises(ValueError):
            parse_matrix([], 'g')
        with self.assertRaises(ValueError):
            parse_matrix([['1'], ['1', '2']], 'g')
        with self.assertRaises(ValueError):
            parse_matrix(['1', '2'], 'g')
        with self.assertRaises(ValueError):
            parse_matrix([['1', '2']], 'g', nrows=2)
        with self.assertRaises(ValueError):
            parse_matrix([['1', '2']], 'g', ncols=3)


class TestThreadCap(unittest.TestCase):
    def test_default(self):
        with mock.patch.dict(os.environ, {THREADS_ENV_VAR: ''}):
            cap = thread_cap()
        self.assertGreaterEqual(cap, 1)
        self.assertLessEqual(cap, 4)

    def test_from_environment(self):
        with mock.patch.dict(os.environ, {THREADS_ENV_VAR: '7'}):
            self.assertEqual(thread_cap(), 7)

    def test_invalid(self):
        for val in ('abc', '0', '-2'):
            with mock.patch.dict(os.environ, {THREADS_ENV_VAR: val}):
                with self.assertRaises(ValueError):
                    thread_cap()
