import os
import tempfile
import unittest

import numpy as np

from powergame.protocol import NetworkConfig
from simulation.network.scenario import Scenario, cellular_scenario, generate_scenario
from simulation.network.topology import estimate_q
from simulation.utils import derive_seed


class TestScenario(unittest.TestCase):

    def setUp(self):
        self.cfg = NetworkConfig(node_count=12, seed=5)
        self.scenario = generate_scenario(self.cfg, 16)

    def test_json_round_trip(self):
        restored = Scenario.from_json(self.scenario.to_json())
        np.testing.assert_array_equal(restored.network.gains, self.scenario.network.gains)
        np.testing.assert_array_equal(restored.network.next_hop, self.scenario.network.next_hop)
        np.testing.assert_array_equal(restored.spreading.sequences, self.scenario.spreading.sequences)
        np.testing.assert_array_equal(restored.spreading.rho, self.scenario.spreading.rho)
        self.assertEqual(restored.config, self.cfg)

    def test_save_and_load(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "scenario.json")
            self.scenario.save(path)
            restored = Scenario.load(path)
        np.testing.assert_array_equal(restored.network.positions, self.scenario.network.positions)

    def test_spreading_seed_follows_processing_gain(self):
        wider = generate_scenario(self.cfg, 32, network=self.scenario.network)
        np.testing.assert_array_equal(wider.network.gains, self.scenario.network.gains)
        np.testing.assert_array_equal(wider.network.next_hop, self.scenario.network.next_hop)
        self.assertEqual(wider.processing_gain, 32)
        expected = generate_scenario(self.cfg, 16, spreading_seed=derive_seed(self.cfg.seed, 16), network=self.scenario.network)
        np.testing.assert_array_equal(expected.spreading.signs, self.scenario.spreading.signs)

    def test_cellular_scenario(self):
        scenario = cellular_scenario([1.0, 2.0, 4.0], 8, noise_power=0.5)
        np.testing.assert_array_equal(scenario.network.next_hop, [3, 3, 3])
        np.testing.assert_allclose(scenario.network.primary_power_gains(), [1.0, 2.0, 4.0])
        self.assertEqual(estimate_q(scenario.network), 1.0)
        self.assertEqual(scenario.noise_power, 0.5)


if __name__ == '__main__':
    unittest.main()
