import unittest
import json
import math

import numpy as np

from polyest.forms import SymmetricForm
from polyest.norms import LpSpace
from polyest.series import DECLARED, EXACT_GEOMETRIC, PowerSeries, derivative_floor, \
    dn_check_fd, dn_taylor, eval_series, radius_uniform, reexpand, rho_bar, \
    verify_analyticity, verify_taylor_identity
from polyest.utilities import InputRejected, SeriesDivergence, get_polyest_Dir, \
    restart_rng

BUDGET = 16


def binomial_terms(M):
    return [SymmetricForm(m, 2, {(j, m - j): float(math.comb(m, j)) for j in range(m + 1)})
            for m in range(M + 1)]


def random_cubic(seed):
    rng = restart_rng(seed, 0)
    terms = [SymmetricForm.random(m, 3, rng) for m in range(4)]
    return PowerSeries.polynomial(terms, LpSpace(2, 3))

###############################################################################
# TEST CASE 1: the geometric series sum x^m
###############################################################################

class TCGeometricSeries(unittest.TestCase):

    def setUp(self):
        self.series = PowerSeries.geometric(1.0, 200)

    def test_eval(self):
        value, tail = eval_series(PowerSeries.geometric(1.0, 60), [0.5])
        self.assertAlmostEqual(value, 2.0, places=15)
        self.assertLess(tail, 1e-17)
        self.assertEqual(eval_series(self.series, [0.0]).value, 1.0)

    def test_divergence(self):
        with self.assertRaises(SeriesDivergence):
            eval_series(self.series, [1.5])

    def test_radius(self):
        for c in (0.5, 1.0, 2.0, 5.0):
            radius = radius_uniform(PowerSeries.geometric(c, 40))
            self.assertEqual(radius.method, EXACT_GEOMETRIC)
            self.assertAlmostEqual(radius.rho, 1.0 / c, delta=1e-9)
        self.assertAlmostEqual(radius_uniform(self.series).rho, 1.0)

    def test_rho_bar(self):
        bar = rho_bar(self.series)
        self.assertAlmostEqual(bar.rho_bar, 1.0)
        self.assertAlmostEqual(bar.floor, 0.7071067811865476)

    def test_reexpand(self):
        plan = reexpand(self.series, [0.3], K=40)
        self.assertAlmostEqual(plan.valid_ball_radius, 0.7)
        for k in (0, 1, 5):
            A_k = plan.coefficients[k]
            self.assertAlmostEqual(A_k.coeffs[(k,)], 1.0 / 0.7 ** (k + 1), places=9)
        self.assertAlmostEqual(plan.coefficients[0].constant, 1.428571428571428, places=12)

    def test_reexpand_at_center(self):
        plan = reexpand(self.series, [0.0], K=10)
        for k in range(11):
            self.assertEqual(plan.coefficients[k].coeffs, self.series.terms[k].coeffs)

    def test_reexpand_outside(self):
        with self.assertRaises(InputRejected):
            reexpand(self.series, [1.2])

    def test_analyticity(self):
        report = verify_analyticity(self.series, [0.3], [0.6])
        self.assertTrue(report.passed, report.failures)
        self.assertAlmostEqual(report.values['reexpanded'], 2.5, delta=1e-8)
        report = verify_analyticity(self.series, [0.3], [0.3])
        self.assertAlmostEqual(report.values['reexpanded'], 1.0 / 0.7, places=12)

    def test_analyticity_truncated(self):
        report = verify_analyticity(self.series, [0.3], [0.6], K=20)
        self.assertTrue(report.claims['majorant_dominates'])
        self.assertGreater(report.values['majorant'], 0.0)

    def test_dn_taylor(self):
        derivative = dn_taylor(self.series, 1)
        self.assertEqual(derivative.terms[3].coeffs[(4,)], 4.0)
        self.assertAlmostEqual(derivative.evaluate([0.5], [np.ones(1)]), 4.0, places=12)
        self.assertAlmostEqual(dn_taylor(self.series, 2).floor, 1.0 / math.sqrt(2.0))
        self.assertAlmostEqual(dn_taylor(self.series, 3).floor, 0.6065306597126334)
        with self.assertRaises(InputRejected):
            dn_taylor(PowerSeries.geometric(1.0, 2), 3)

    def test_derivative_floor(self):
        self.assertEqual(derivative_floor(1.0, 1), 1.0 / math.sqrt(2.0))
        self.assertEqual(derivative_floor(2.0, 4), 2.0 / math.sqrt(math.e))

    def test_dn_check_fd(self):
        for n in (1, 2):
            report = dn_check_fd(self.series, n, [0.5])
            self.assertTrue(report.passed, report.values)

    def test_taylor_identity(self):
        report = verify_taylor_identity(self.series, [0.3], 3)
        self.assertTrue(report.passed, report.values)

###############################################################################
# TEST CASE 2: finite multivariate polynomials
###############################################################################

class TCPolynomialSeries(unittest.TestCase):

    def setUp(self):
        self.series = random_cubic(42)
        self.y = np.array([0.4, -0.2, 0.1])
        self.x = np.array([-0.5, 0.3, 0.8])

    def test_radius(self):
        radius = radius_uniform(self.series)
        self.assertEqual(radius.method, DECLARED)
        self.assertTrue(math.isinf(radius.rho))
        self.assertTrue(math.isinf(rho_bar(self.series).rho_bar))

    def test_exact_sum(self):
        value, tail = eval_series(self.series, self.x)
        expected = math.fsum(float(t.eval_batch(self.x[None, :])[0]) for t in self.series.terms)
        self.assertAlmostEqual(value, expected, places=13)
        self.assertEqual(tail, 0.0)

    def test_reexpansion_exact(self):
        report = verify_analyticity(self.series, self.y, self.x, tolerance=1e-12)
        self.assertTrue(report.passed, report.values)

    def test_derivatives(self):
        for n in (1, 2):
            self.assertTrue(dn_check_fd(self.series, n, self.x, seed=3).passed)
        self.assertTrue(verify_taylor_identity(self.series, self.y, 3, seed=3).passed)

    def test_undeclared_sparse_series(self):
        terms = list(self.series.terms) + [SymmetricForm.zero(4, 3)]
        with self.assertRaises(InputRejected):
            radius_uniform(PowerSeries(terms, LpSpace(2, 3)))

    def test_all_zero_tail(self):
        terms = [SymmetricForm.constant_form(1.0, 2)] + \
            [SymmetricForm.zero(m, 2) for m in range(1, 10)]
        self.assertTrue(math.isinf(radius_uniform(PowerSeries(terms, LpSpace(2, 2))).rho))

    def test_truncated_limsup(self):
        # (x1 + x2)^m on l_1^2 has norm 1 for every m
        radius = radius_uniform(PowerSeries(binomial_terms(20), LpSpace(1, 2)), BUDGET)
        self.assertAlmostEqual(radius.rho, 1.0, delta=1e-6)

    def test_rho_bar_high_degree(self):
        # (x1 + x2)^m on l_2^2: ||L^_m|| = ||L_m||_(2) = 2^(m/2), so rho_bar = rho
        bars = []
        for M in (20, 40):
            series = PowerSeries(binomial_terms(M), LpSpace(2, 2))
            bar = rho_bar(series, BUDGET)
            self.assertIsNotNone(bar.empirical)
            self.assertAlmostEqual(bar.rho, 1.0 / math.sqrt(2.0), places=9)
            self.assertAlmostEqual(bar.rho_bar, bar.rho, places=6)
            bars.append(bar.rho_bar)
        self.assertAlmostEqual(bars[0], bars[1], places=6)

    def test_rejects_malformed_terms(self):
        with self.assertRaises(InputRejected):
            PowerSeries([SymmetricForm.zero(1, 2)], LpSpace(2, 2))
        with self.assertRaises(InputRejected):
            PowerSeries([], LpSpace(2, 2))

###############################################################################
# TEST CASE 3: stock series files
###############################################################################

class TCSeriesFiles(unittest.TestCase):

    def setUp(self):
        self.path = get_polyest_Dir() + '/data/example/'

    def load(self, fname):
        with open(self.path + fname) as f:
            return PowerSeries.from_json(json.load(f))

    def test_geometric_file(self):
        series = self.load('geometric_1d.json')
        self.assertEqual(series.degree, 200)
        self.assertAlmostEqual(radius_uniform(series).rho, 1.0)
        self.assertAlmostEqual(rho_bar(series).floor, 0.70711, places=5)

    def test_cubic_file(self):
        series = self.load('cubic_3d.json')
        self.assertEqual(series.dim, 3)
        self.assertTrue(math.isinf(radius_uniform(series).rho))
        self.assertEqual(series.to_json()['radius'], 'inf')

    def test_malformed(self):
        with self.assertRaises(InputRejected):
            PowerSeries.from_json({'terms': []})


if __name__ == '__main__':
    unittest.main()
