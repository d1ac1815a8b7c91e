import unittest
import math
from fractions import Fraction

import numpy as np

from polyest.config import Caps
from polyest.forms import Partition, SymmetricForm, block_sign_sums, contract, \
    eval_direct_oracle, eval_mixed, eval_mixed_batch, eval_poly, gradient, \
    log_mixed_amplification, mixed_by_contraction, polarize, polarize_exact, shift_part, \
    taylor_pieces
from polyest.utilities import CapExceeded, InputRejected, restart_rng

###############################################################################
# TEST CASE 1: monomials with known polarizations
###############################################################################

class TCSymmetricForm(unittest.TestCase):

    def setUp(self):
        self.x1x2 = SymmetricForm(2, 2, {(1, 1): 1.0})
        self.x1x2x3 = SymmetricForm.product_form(3)
        self.x1sq_x2 = SymmetricForm(3, 2, {(2, 1): 1.0})
        self.e = np.eye(3)

    def test_eval_poly(self):
        self.assertEqual(eval_poly(self.x1x2, [1.0, 1.0]), 1.0)
        self.assertAlmostEqual(eval_poly(self.x1x2, [0.5, 0.5]), 0.25)
        form = SymmetricForm.random(4, 3, restart_rng(42, 0))
        self.assertEqual(eval_poly(form, np.zeros(3)), 0.0)

    def test_eval_poly_rejects_dimension(self):
        with self.assertRaises(InputRejected):
            eval_poly(self.x1x2, [1.0, 2.0, 3.0])

    def test_polarize_monomials(self):
        self.assertAlmostEqual(polarize(self.x1x2, [[1, 0], [0, 1]]), 0.5, places=15)
        self.assertAlmostEqual(polarize(self.x1x2x3, list(self.e)), 1.0 / 6.0, places=15)

    def test_polarize_rejects_argument_count(self):
        with self.assertRaises(InputRejected):
            polarize(self.x1x2, [[1, 0]])

    def test_eval_mixed(self):
        self.assertAlmostEqual(eval_mixed(self.x1x2, Partition([1, 1]), [[1, 0], [0, 1]]), 0.5)
        self.assertAlmostEqual(eval_mixed(self.x1sq_x2, Partition([2, 1]), [[1, 0], [0, 1]]),
                               1.0 / 3.0, places=15)
        x = np.array([0.3, -0.7])
        self.assertAlmostEqual(eval_mixed(self.x1sq_x2, Partition([3]), [x]),
                               eval_poly(self.x1sq_x2, x), places=15)

    def test_oracle(self):
        self.assertAlmostEqual(eval_direct_oracle(self.x1x2, [[1, 0], [0, 1]]), 0.5)
        rng = restart_rng(42, 1)
        for i in range(5):
            form = SymmetricForm.random(int(rng.integers(1, 5)), 3, rng)
            args = list(rng.standard_normal((form.degree, 3)))
            self.assertAlmostEqual(polarize(form, args), eval_direct_oracle(form, args),
                                   places=10)
            x = args[0]
            self.assertAlmostEqual(eval_direct_oracle(form, [x] * form.degree),
                                   eval_poly(form, x), places=10)

    def test_oracle_caps(self):
        form = SymmetricForm.random(3, 7, restart_rng(42, 2))
        with self.assertRaises(CapExceeded):
            eval_direct_oracle(form, [np.ones(7)] * 3)
        self.assertIsInstance(eval_direct_oracle(form, [np.ones(7)] * 3,
                                                 Caps(oracle_max_dim=7)), float)

    def test_polarize_caps(self):
        form = SymmetricForm(25, 2, {(25, 0): 1.0})
        with self.assertRaises(CapExceeded):
            polarize(form, [np.ones(2)] * 25)

    def test_polarize_exact(self):
        value = polarize_exact(self.x1x2x3, [[1, 0, 0], [0, 1, 0], [0, 0, 1]])
        self.assertEqual(value, Fraction(1, 6))
        form = SymmetricForm(2, 2, {(2, 0): 1.0, (0, 2): -3.0, (1, 1): 0.5})
        self.assertEqual(polarize_exact(form, [[1, 2], [3, -1]]),
                         Fraction(3) + Fraction(-3) * 2 * -1 + Fraction(1, 4) * (1 * -1 + 2 * 3))

    def test_symmetry_and_linearity(self):
        rng = restart_rng(42, 3)
        form = SymmetricForm.random(4, 3, rng)
        args = list(rng.standard_normal((4, 3)))
        value = polarize(form, args)
        self.assertAlmostEqual(polarize(form, args[::-1]), value, places=12)
        u, v = rng.standard_normal((2, 3))
        left = polarize(form, [2.0 * u - v] + args[1:])
        right = 2.0 * polarize(form, [u] + args[1:]) - polarize(form, [v] + args[1:])
        self.assertAlmostEqual(left, right, places=10)

    def test_gradient(self):
        form = SymmetricForm(3, 2, {(2, 1): 1.0, (0, 3): -2.0})
        x = np.array([0.4, -1.3])
        np.testing.assert_allclose(gradient(form, x),
                                   [2 * x[0] * x[1], x[0] ** 2 - 6 * x[1] ** 2], rtol=1e-14)

    def test_json(self):
        form = SymmetricForm.random(3, 2, restart_rng(42, 4))
        obj = form.to_json()
        self.assertEqual(obj['m'], 3)
        self.assertEqual(obj['d'], 2)
        self.assertEqual(SymmetricForm.from_json(obj).coeffs, form.coeffs)
        with self.assertRaises(InputRejected):
            SymmetricForm.from_json({'m': 2, 'coeffs': []})

    def test_constant_and_zero(self):
        self.assertTrue(SymmetricForm.zero(3, 2).is_zero())
        self.assertEqual(polarize(SymmetricForm.constant_form(2.5, 3), []), 2.5)
        self.assertEqual(polarize(SymmetricForm.zero(2, 2), [[1, 0], [0, 1]]), 0.0)

###############################################################################
# TEST CASE 2: partitions, contraction and batched evaluation
###############################################################################

class TCMixedEvaluation(unittest.TestCase):

    def setUp(self):
        self.rng = restart_rng(42, 10)
        self.form = SymmetricForm.random(5, 3, self.rng)

    def test_partition(self):
        partition = Partition.parse('2,0,1')
        self.assertEqual(partition.parts, (2, 1))
        self.assertEqual(partition.m, 3)
        self.assertEqual(partition.n, 2)
        self.assertEqual(str(partition), '2,1')
        self.assertLess(Partition([1, 2]), Partition([2, 1]))
        with self.assertRaises(InputRejected):
            Partition.parse('2,a')
        with self.assertRaises(InputRejected):
            Partition([2, -1])

    def test_contraction_matches_polarization(self):
        vectors = list(self.rng.standard_normal((2, 3)))
        partition = Partition([3, 2])
        self.assertAlmostEqual(mixed_by_contraction(self.form, partition, vectors),
                               eval_mixed(self.form, partition, vectors), places=10)

    def test_mixed_above_polarize_cap(self):
        vectors = list(self.rng.standard_normal((2, 3)))
        partition = Partition([3, 2])
        self.assertAlmostEqual(eval_mixed(self.form, partition, vectors,
                                          Caps(polarize_max_degree=3)),
                               eval_mixed(self.form, partition, vectors), places=10)
        # (x1 + x2)^26: L(a^13 b^13) = (a1 + a2)^13 (b1 + b2)^13
        form = SymmetricForm(26, 2, {(j, 26 - j): float(math.comb(26, j)) for j in range(27)})
        a, b = np.array([0.5, 0.25]), np.array([-0.5, 1.0])
        self.assertAlmostEqual(eval_mixed(form, Partition([13, 13]), [a, b]),
                               0.75 ** 13 * 0.5 ** 13, places=12)
        self.assertAlmostEqual(eval_mixed(form, Partition([13, 13]), [[1, 0], [0, 1]]), 1.0,
                               places=12)
        with self.assertRaises(InputRejected):
            eval_mixed(form, Partition([13, 13]), [a])

    def test_shift_part(self):
        y, z = self.rng.standard_normal((2, 3))
        expected = math.comb(5, 2) * eval_mixed(self.form, Partition([2, 3]), [y, z])
        self.assertAlmostEqual(eval_poly(shift_part(self.form, y, 2), z), expected, places=10)
        self.assertAlmostEqual(eval_poly(contract(self.form, y, 5), np.zeros(3)),
                               eval_poly(self.form, y), places=10)
        with self.assertRaises(InputRejected):
            shift_part(self.form, y, 6)

    def test_taylor_pieces(self):
        y, z = self.rng.standard_normal((2, 3))
        pieces = taylor_pieces(self.form, y)
        self.assertEqual(len(pieces), 6)
        total = math.fsum(eval_poly(P, z) for P in pieces)
        self.assertAlmostEqual(total, eval_poly(self.form, y + z), places=10)
        self.assertAlmostEqual(eval_poly(pieces[0], z), eval_poly(self.form, y), places=10)

    def test_block_sign_sums(self):
        sums, weights, scale = block_sign_sums((2, 1))
        self.assertEqual(sums.shape, (6, 2))
        self.assertEqual(weights.sum(), 0.0)
        self.assertAlmostEqual(np.abs(weights).sum() * scale * math.factorial(3), 1.0)

    def test_mixed_amplification(self):
        sums, weights, scale = block_sign_sums((2, 1))
        direct = np.sum(np.abs(weights) * np.abs(sums).sum(axis=1) ** 3) * scale
        self.assertAlmostEqual(log_mixed_amplification((2, 1)), math.log(direct), places=12)
        self.assertEqual(log_mixed_amplification((4,)), 0.0)
        self.assertLess(log_mixed_amplification((20, 20)), math.log(1e8))
        self.assertGreater(log_mixed_amplification((60, 60)), math.log(1e12))

    def test_batch(self):
        X = self.rng.standard_normal((4, 2, 3))
        values, grad = eval_mixed_batch(self.form, (2, 3), X, with_grad=True)
        for r in range(4):
            self.assertAlmostEqual(values[r], eval_mixed(self.form, Partition([2, 3]), X[r]),
                                   places=10)
        h = 1e-5
        up, down = X.copy(), X.copy()
        up[0, 1, 2] += h
        down[0, 1, 2] -= h
        fd = (eval_mixed_batch(self.form, (2, 3), up)[0] -
              eval_mixed_batch(self.form, (2, 3), down)[0]) / (2.0 * h)
        np.testing.assert_allclose(fd, grad[0, 1, 2], rtol=1e-5, atol=1e-6)


if __name__ == '__main__':
    unittest.main()
