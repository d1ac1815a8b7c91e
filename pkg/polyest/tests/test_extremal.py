import unittest
import math

import numpy as np

from polyest.bounds import bound_lp_lower, bound_x_lower
from polyest.extremal import build_extremal_lp, build_extremal_x, verify_extremal
from polyest.forms import Partition
from polyest.utilities import InputRejected

BUDGET = 16

###############################################################################
# TEST CASE 1: product form witnesses
###############################################################################

class TCExtremal(unittest.TestCase):

    def test_build_x(self):
        instance = build_extremal_x(Partition([1, 1]))
        self.assertEqual(instance.kind, 'x')
        self.assertEqual(instance.p, 1.0)
        np.testing.assert_allclose(instance.vectors, [[1.0, 0.0], [0.0, 1.0]])
        self.assertAlmostEqual(instance.attained_value, 0.5)
        self.assertAlmostEqual(instance.analytic_poly_norm, 0.25)
        self.assertAlmostEqual(instance.ratio, bound_x_lower((1, 1)).value)

    def test_build_lp(self):
        instance = build_extremal_lp(Partition([2, 1]), 2.0)
        np.testing.assert_allclose(instance.vectors[0], [2 ** -0.5, 2 ** -0.5, 0.0])
        np.testing.assert_allclose(instance.vectors[1], [0.0, 0.0, 1.0])
        expected = (2.0 / 6.0) / 2.0 ** (2.0 / 2.0)
        self.assertAlmostEqual(instance.attained_value, expected, places=15)
        self.assertAlmostEqual(instance.ratio, bound_lp_lower((2, 1), 2.0).value, places=12)

    def test_lp_at_one_matches_x(self):
        x = build_extremal_x(Partition([3, 2]))
        lp = build_extremal_lp(Partition([3, 2]), 1)
        self.assertEqual(x.attained_value, lp.attained_value)
        self.assertEqual(x.analytic_poly_norm, lp.analytic_poly_norm)

    def test_rejects(self):
        with self.assertRaises(InputRejected):
            build_extremal_lp(Partition([1, 1]), np.inf)
        with self.assertRaises(InputRejected):
            build_extremal_lp(Partition([1, 1]), 0.5)
        with self.assertRaises(InputRejected):
            build_extremal_x(Partition([]))

    def test_verify_x(self):
        report = verify_extremal(build_extremal_x(Partition([1, 1])), BUDGET)
        self.assertTrue(report.passed, report.failures)
        self.assertLess(abs(report.values['deviation']), 1e-10)
        self.assertIn('exact_rational', report.claims)

    def test_verify_single_part(self):
        instance = build_extremal_x(Partition([4]))
        self.assertAlmostEqual(instance.ratio, 1.0, places=14)
        self.assertTrue(verify_extremal(instance, BUDGET).passed)

    def test_verify_lp(self):
        report = verify_extremal(build_extremal_lp(Partition([2, 1]), 2.0), BUDGET)
        self.assertTrue(report.passed, report.failures)
        self.assertLess(abs(report.values['deviation']), 1e-9)

    def test_verify_several(self):
        for parts in ((2, 2), (3, 1, 1), (1, 1, 1, 1)):
            for p in (1.5, 4.0, float(sum(parts))):
                report = verify_extremal(build_extremal_lp(Partition(parts), p), BUDGET)
                self.assertTrue(report.passed, (parts, p, report.failures))

    def test_failure_is_reported(self):
        instance = build_extremal_x(Partition([2, 1]))
        instance.attained_value *= 1.01
        report = verify_extremal(instance, BUDGET)
        self.assertFalse(report.passed)
        self.assertIn('closed_form', report.failures)

    def test_json(self):
        instance = build_extremal_lp(Partition([2, 1]), 4.0)
        obj = instance.to_json()
        self.assertEqual(obj['partition'], [2, 1])
        self.assertEqual(obj['space'], {'p': 4.0, 'd': 3})
        self.assertEqual(obj['form']['coeffs'], [{'alpha': [1, 1, 1], 'c': 1.0}])
        self.assertTrue(math.isclose(obj['ratio'], instance.ratio))


if __name__ == '__main__':
    unittest.main()
