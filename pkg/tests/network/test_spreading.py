import unittest

import numpy as np

from simulation.network.spreading import SpreadingSet, generate_spreading


class TestSpreading(unittest.TestCase):

    def setUp(self):
        self.spread = generate_spreading(10, 50, np.random.default_rng(1))

    def test_entries_are_scaled_signs(self):
        np.testing.assert_array_equal(np.abs(self.spread.sequences), np.full((50, 10), 1 / np.sqrt(50)))
        self.assertEqual(self.spread.processing_gain, 50)
        self.assertEqual(self.spread.size, 10)

    def test_cross_correlation(self):
        rho = self.spread.rho
        np.testing.assert_array_equal(np.diag(rho), np.ones(10))
        np.testing.assert_allclose(rho, rho.T)
        np.testing.assert_allclose(rho, self.spread.sequences.T @ self.spread.sequences, atol=1e-15)

    def test_from_sequences_pair(self):
        sequences = np.array([[1, 1], [1, 1], [1, 1], [1, -1]]) / 2.0
        spread = SpreadingSet.from_sequences(sequences)
        self.assertAlmostEqual(spread.rho[0, 1], 0.5)

    def test_reproducible(self):
        again = generate_spreading(10, 50, np.random.default_rng(1))
        np.testing.assert_array_equal(self.spread.signs, again.signs)

    def test_invalid_sizes(self):
        with self.assertRaises(ValueError):
            generate_spreading(0, 4, np.random.default_rng(0))


if __name__ == '__main__':
    unittest.main()
