import unittest
from unittest.mock import patch

import numpy as np
from scipy.linalg import LinAlgError

from powergame.protocol import NetworkConfig, ReceiverKind
from simulation.errors import ReceiverError, SingularSpreadingError, SolverError
from simulation.network.scenario import cellular_scenario, generate_scenario
from simulation.network.spreading import SpreadingSet
from simulation.receivers import (
    DecorrelatorReceiver,
    MatchedFilterReceiver,
    MMSEReceiver,
    ReceiverFactory,
    decorrelator_bank,
    sinr_linear,
    sinr_mf,
    sinr_mmse,
)
from simulation.receivers.mmse import factor_covariance, interference_covariance

PAIR = np.array([[1.0, 1.0], [1.0, 1.0], [1.0, 1.0], [1.0, -1.0]]) / 2.0


def pair_scenario(noise_power):
    return cellular_scenario([1.0, 1.0], 4, noise_power=noise_power, spreading=SpreadingSet.from_sequences(PAIR))


class TestPairOracle(unittest.TestCase):

    def test_matched_filter(self):
        scenario = pair_scenario(0.75)
        self.assertAlmostEqual(sinr_mf(0, [1.0, 1.0], scenario.network, scenario.spreading), 1.0, places=12)

    def test_decorrelator(self):
        scenario = pair_scenario(1.0)
        bank = decorrelator_bank(scenario.spreading)
        self.assertAlmostEqual(bank.filters[:, 0] @ bank.filters[:, 0], 4.0 / 3.0, places=12)
        np.testing.assert_allclose(PAIR.T @ bank.filters, np.eye(2), atol=1e-12)
        self.assertAlmostEqual(DecorrelatorReceiver(scenario).sinr(0, [1.0, 1.0]), 0.75, places=12)

    def test_mmse(self):
        scenario = pair_scenario(1.0)
        # 1 - rho^2 / (1 + sigma^-2)
        self.assertAlmostEqual(MMSEReceiver(scenario).sinr(0, [1.0, 1.0]), 0.875, places=12)

    def test_ordering(self):
        scenario = pair_scenario(1.0)
        powers = [1.0, 1.0]
        mmse = MMSEReceiver(scenario).sinr(1, powers)
        mf = MatchedFilterReceiver(scenario).sinr(1, powers)
        de = DecorrelatorReceiver(scenario).sinr(1, powers)
        self.assertGreaterEqual(mmse, mf)
        self.assertGreaterEqual(mmse, de)


class TestReceivers(unittest.TestCase):

    def setUp(self):
        self.scenario = cellular_scenario([1.0, 2.0, 3.0, 4.0, 5.0, 6.0], 16, noise_power=0.1, seed=3)
        self.powers = np.random.default_rng(0).uniform(0.1, 1.0, 6)

    def test_filters_agree_with_linear_sinr(self):
        for kind in ReceiverKind:
            receiver = ReceiverFactory.create_receiver(kind, self.scenario)
            for k in range(6):
                direct = receiver.sinr(k, self.powers)
                through_filter = sinr_linear(receiver.filter(k, self.powers), k, self.powers, self.scenario.network, self.scenario.spreading)
                self.assertAlmostEqual(through_filter / direct, 1.0, places=9, msg=f"{kind} node {k}")

    def test_vectorized_sinrs(self):
        for kind in ReceiverKind:
            receiver = ReceiverFactory.create_receiver(kind, self.scenario)
            looped = np.array([receiver.sinr(k, self.powers) for k in range(6)])
            np.testing.assert_allclose(receiver.sinrs(self.powers), looped, rtol=1e-10)
            np.testing.assert_allclose(receiver.sinrs(self.powers, workers=2), looped, rtol=1e-10)

    def test_mmse_dominates(self):
        mmse = MMSEReceiver(self.scenario).sinrs(self.powers)
        mf = MatchedFilterReceiver(self.scenario).sinrs(self.powers)
        de = DecorrelatorReceiver(self.scenario).sinrs(self.powers)
        self.assertTrue(np.all(mmse >= mf * (1 - 1e-12)))
        self.assertTrue(np.all(mmse >= de * (1 - 1e-12)))

    def test_decorrelator_ignores_interferers(self):
        receiver = DecorrelatorReceiver(self.scenario)
        louder = self.powers.copy()
        louder[1:] *= 100.0
        self.assertAlmostEqual(receiver.sinr(0, louder), receiver.sinr(0, self.powers), places=12)

    def test_best_response_reaches_target(self):
        for kind in ReceiverKind:
            receiver = ReceiverFactory.create_receiver(kind, self.scenario)
            power, capped = receiver.best_response_power(2, self.powers, 3.0, 10.0)
            self.assertFalse(capped)
            trial = self.powers.copy()
            trial[2] = power
            self.assertAlmostEqual(receiver.sinr(2, trial), 3.0, places=9)

    def test_best_response_capped(self):
        receiver = MatchedFilterReceiver(self.scenario)
        power, capped = receiver.best_response_power(0, self.powers, 3.0, 1e-12)
        self.assertTrue(capped)
        self.assertEqual(power, 1e-12)

    def test_mmse_best_response_matches_linear_slope(self):
        receiver = MMSEReceiver(self.scenario)
        brent, _ = receiver.best_response_power(4, self.powers, 2.0, 10.0)
        linear = 2.0 / receiver.sinr_slope(4, self.powers)
        self.assertAlmostEqual(brent / linear, 1.0, places=9)

    def test_mmse_factor_reused(self):
        receiver = MMSEReceiver(self.scenario)
        first = receiver.factor(0, self.powers)
        moved = self.powers.copy()
        moved[0] *= 2.0
        self.assertIs(receiver.factor(0, moved), first)
        moved[1] *= 2.0
        self.assertIsNot(receiver.factor(0, moved), first)

    def test_bank_receivers(self):
        bank = MatchedFilterReceiver(self.scenario).bank(self.powers)
        self.assertEqual(bank.filters.shape, (16, 6))
        np.testing.assert_array_equal(bank.receivers, self.scenario.network.next_hop)

    def test_zero_filter_rejected(self):
        with self.assertRaises(ValueError):
            sinr_linear(np.zeros(16), 0, self.powers, self.scenario.network, self.scenario.spreading)


class TestReceiverErrors(unittest.TestCase):

    def test_decorrelator_needs_k_at_most_n(self):
        scenario = generate_scenario(NetworkConfig(node_count=6, seed=3), 4)
        with self.assertRaises(ReceiverError):
            DecorrelatorReceiver(scenario)

    def test_decorrelator_singular(self):
        sequences = np.array([[1.0, 1.0], [1.0, 1.0], [1.0, 1.0], [1.0, 1.0]]) / 2.0
        with self.assertRaises(SingularSpreadingError):
            decorrelator_bank(SpreadingSet.from_sequences(sequences))

    def test_cholesky_failure(self):
        scenario = pair_scenario(1.0)
        covariance = interference_covariance(0, [1.0, 1.0], scenario.network, scenario.spreading)
        with patch("simulation.receivers.mmse.cho_factor", side_effect=LinAlgError("not positive definite")):
            with self.assertRaises(SolverError) as context:
                factor_covariance(covariance)
        self.assertIsNotNone(context.exception.condition_number)

    def test_mmse_without_interference(self):
        scenario = pair_scenario(0.5)
        self.assertAlmostEqual(sinr_mmse(0, np.array([1.0, 0.0]), scenario.network, scenario.spreading), 2.0, places=12)


class TestReceiverFactory(unittest.TestCase):

    def test_create_by_name(self):
        scenario = pair_scenario(1.0)
        self.assertIsInstance(ReceiverFactory.create_receiver("mf", scenario), MatchedFilterReceiver)
        self.assertIsInstance(ReceiverFactory.create_receiver(ReceiverKind.MMSE, scenario), MMSEReceiver)

    def test_unsupported(self):
        with self.assertRaises(ValueError) as context:
            ReceiverFactory.create_receiver("rake", pair_scenario(1.0))
        self.assertIn("Unsupported receiver", str(context.exception))


if __name__ == '__main__':
    unittest.main()
