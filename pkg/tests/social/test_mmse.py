import unittest

import numpy as np

from powergame.protocol import GameConfig, ReceiverKind
from simulation.asymptotic import AsymptoticParams, ExponentialLaw, LargeSystem, PointMass
from simulation.errors import InfeasibleSinrError
from simulation.game.efficiency import EfficiencyFunction
from simulation.game.nash import nash_solve, utilities
from simulation.network.scenario import cellular_scenario
from simulation.receivers import MMSEReceiver
from simulation.social import mmse_kappa, mmse_social_optimum, mmse_social_optimum_by_scan, mmse_social_optimum_sinr, mmse_socopt_powers
from simulation.social.mmse import LARGE_SYSTEM, PRINTED, feasible_upper


def exponential_params(load, sharing):
    law = ExponentialLaw(1.0)
    return AsymptoticParams(load=load, sharing=sharing, noise_power=1.0, primary_law=law, interferer_law=law)


class TestOptimalSinr(unittest.TestCase):

    def setUp(self):
        self.efficiency = EfficiencyFunction(100)
        self.system = LargeSystem(exponential_params(0.5, 0.3))

    def test_root_matches_scan(self):
        root = mmse_social_optimum_sinr(self.system, self.efficiency)
        scanned = mmse_social_optimum_by_scan(self.system, self.efficiency)
        self.assertAlmostEqual(root / scanned, 1.0, places=5)
        self.assertLess(root, self.efficiency.target_sinr())

    def test_printed_form(self):
        printed = mmse_social_optimum_sinr(self.system, self.efficiency, form=PRINTED)
        self.assertTrue(0.0 < printed < self.efficiency.target_sinr())

    def test_unknown_form(self):
        with self.assertRaises(ValueError):
            mmse_social_optimum_sinr(self.system, self.efficiency, form="other")

    def test_no_interference(self):
        params = AsymptoticParams(load=0.0, sharing=0.5, noise_power=1.0, primary_law=PointMass(1.0), interferer_law=PointMass(1.0))
        self.assertAlmostEqual(mmse_social_optimum_sinr(params, self.efficiency), self.efficiency.target_sinr(), places=9)

    def test_empty_region(self):
        params = AsymptoticParams(load=1e7, sharing=1.0, noise_power=1.0, primary_law=PointMass(1.0), interferer_law=PointMass(1.0))
        with self.assertRaises(InfeasibleSinrError):
            mmse_social_optimum_sinr(params, self.efficiency)

    def test_optimum_inside_heavy_load(self):
        system = LargeSystem(exponential_params(3.0, 0.5))
        optimum = mmse_social_optimum_sinr(system, self.efficiency)
        self.assertLess(system.interference_load(optimum), 1.0)
        self.assertLessEqual(optimum, feasible_upper(system, self.efficiency.target_sinr()))

    def test_cellular_reduction(self):
        for load, sharing in [(0.5, 0.3), (2.0, 0.2), (4.0, 0.1)]:
            for interferer in (0.0, 1e-6):
                multi_hop = AsymptoticParams(load=load, sharing=sharing, noise_power=1.0, primary_law=PointMass(1.0), interferer_law=PointMass(interferer))
                cellular = AsymptoticParams(load=load * sharing, sharing=1.0, noise_power=1.0, primary_law=PointMass(1.0), interferer_law=PointMass(1.0))
                self.assertLessEqual(load * (1.0 - sharing) * LargeSystem(multi_hop).zeta(0.0), 1e-4)
                self.assertAlmostEqual(
                    mmse_social_optimum_sinr(multi_hop, self.efficiency),
                    mmse_social_optimum_sinr(cellular, self.efficiency),
                    delta=1e-3,
                )

    def test_kappa(self):
        params = AsymptoticParams(load=2.0, sharing=1.0, noise_power=1.0, primary_law=PointMass(1.0), interferer_law=PointMass(1.0))
        # gamma sigma^2 / (1 - beta gamma / (1 + gamma)) at gamma = 0.5
        self.assertAlmostEqual(mmse_kappa(0.5, params), 0.5 / (1.0 - 2.0 / 3.0))


class TestScenarioOptimum(unittest.TestCase):

    def setUp(self):
        self.scenario = cellular_scenario(np.linspace(1.0, 2.0, 10), 40, noise_power=1e-3, seed=9)
        self.cfg = GameConfig(receiver=ReceiverKind.MMSE)

    def test_balanced_powers(self):
        solution = mmse_social_optimum(None, self.scenario, self.cfg)
        self.assertTrue(solution.feasible)
        self.assertIsNone(solution.diagnostic)
        achieved = MMSEReceiver(self.scenario).sinrs(solution.powers)
        np.testing.assert_allclose(achieved, solution.target_sinr, rtol=1e-8)
        self.assertEqual(solution.sinrs, [solution.target_sinr] * 10)

    def test_large_system_powers(self):
        solution = mmse_social_optimum(None, self.scenario, self.cfg, realization=LARGE_SYSTEM)
        received = np.array(solution.powers) * self.scenario.network.primary_power_gains()
        np.testing.assert_allclose(received, received[0], rtol=1e-12)
        params = AsymptoticParams.from_networks([self.scenario.network], 40)
        np.testing.assert_allclose(mmse_socopt_powers(solution.target_sinr, self.scenario.network, params), solution.powers)
        with self.assertRaises(ValueError):
            mmse_social_optimum(None, self.scenario, self.cfg, realization="other")

    def test_close_to_equilibrium_utility(self):
        solution = mmse_social_optimum(None, self.scenario, self.cfg)
        outcome = nash_solve(self.scenario, self.cfg)
        balanced = np.mean(utilities(solution.powers, solution.sinrs, self.cfg))
        equilibrium = np.mean(outcome.utilities)
        self.assertLess(solution.target_sinr, outcome.target_sinr)
        self.assertLess(abs(balanced - equilibrium) / equilibrium, 0.01)

    def test_single_node(self):
        scenario = cellular_scenario([2.0], 16, noise_power=1e-3, seed=3)
        solution = mmse_social_optimum(None, scenario, self.cfg)
        target = EfficiencyFunction(self.cfg.packet_bits).target_sinr()
        self.assertAlmostEqual(solution.target_sinr, target, places=9)
        self.assertAlmostEqual(solution.powers[0], target * 1e-3 / 2.0, places=12)

    def test_powers_above_cap(self):
        solution = mmse_social_optimum(None, self.scenario, GameConfig(max_power=1e-6))
        self.assertTrue(solution.feasible)
        self.assertIn("large-system powers", solution.diagnostic)
        self.assertIn("above max_power", solution.diagnostic)


if __name__ == '__main__':
    unittest.main()
