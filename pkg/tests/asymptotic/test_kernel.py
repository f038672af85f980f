import unittest

import numpy as np

from simulation.asymptotic.fixed_point import solve_fixed_point
from simulation.asymptotic.kernel import effective_interference
from simulation.errors import FixedPointError


class TestKernel(unittest.TestCase):

    def test_values(self):
        self.assertAlmostEqual(float(effective_interference(1.0, 1.0, 1.0)), 0.5)
        self.assertEqual(float(effective_interference(0.0, 2.0, 3.0)), 0.0)
        # a very strong interferer saturates at b / c
        self.assertAlmostEqual(float(effective_interference(1e12, 2.0, 4.0)), 0.5, places=9)

    def test_vectorized(self):
        a = np.array([0.5, 1.0, 2.0])
        np.testing.assert_allclose(effective_interference(a, 1.0, 2.0), a / (1.0 + 2.0 * a))


class TestFixedPoint(unittest.TestCase):

    def test_cosine(self):
        self.assertAlmostEqual(solve_fixed_point(np.cos, 1.0), 0.7390851332, places=7)

    def test_divergent_map(self):
        with self.assertRaises(FixedPointError) as context:
            solve_fixed_point(lambda x: x + 1.0, 0.0, max_iterations=50)
        self.assertEqual(len(context.exception.trace), 50)

    def test_non_finite_map(self):
        with self.assertRaises(FixedPointError):
            solve_fixed_point(lambda x: np.inf, 1.0)


if __name__ == '__main__':
    unittest.main()
