import unittest
from unittest.mock import patch

import numpy as np

from powergame.protocol import GameConfig, ReceiverKind
from simulation.errors import InfeasibleSinrError
from simulation.game.nash import nash_solve
from simulation.network.scenario import cellular_scenario
from simulation.network.spreading import SpreadingSet
from simulation.receivers import MatchedFilterReceiver
from simulation.social import BalancedScorer, mf_balanced_powers, mf_power_derivative, mf_social_optimum, social_optimum

PAIR = np.array([[1.0, 1.0], [1.0, 1.0], [1.0, 1.0], [1.0, -1.0]]) / 2.0


class TestBalancedPowers(unittest.TestCase):

    def setUp(self):
        self.pair = cellular_scenario([1.0, 1.0], 4, noise_power=0.75, spreading=SpreadingSet.from_sequences(PAIR))
        self.scenario = cellular_scenario([1.0, 2.0, 3.0, 4.0], 64, noise_power=1e-3, seed=11)

    def test_pair_oracle(self):
        np.testing.assert_allclose(mf_balanced_powers(1.0, self.pair), [1.0, 1.0], rtol=1e-12)

    def test_pair_infeasible(self):
        # r = gamma sigma^2 / (1 - gamma / 4) has no positive solution past gamma = 4
        with self.assertRaises(InfeasibleSinrError) as context:
            mf_balanced_powers(5.0, self.pair)
        self.assertEqual(context.exception.sinr, 5.0)
        with self.assertRaises(InfeasibleSinrError):
            mf_balanced_powers(0.0, self.pair)

    def test_balanced_sinrs(self):
        powers = mf_balanced_powers(3.0, self.scenario)
        np.testing.assert_allclose(MatchedFilterReceiver(self.scenario).sinrs(powers), 3.0, rtol=1e-10)

    def test_derivative(self):
        step = 1e-6
        numeric = (mf_balanced_powers(3.0 + step, self.scenario) - mf_balanced_powers(3.0 - step, self.scenario)) / (2 * step)
        np.testing.assert_allclose(mf_power_derivative(3.0, self.scenario), numeric, rtol=1e-6)


class TestSocialOptimum(unittest.TestCase):

    def setUp(self):
        self.scenario = cellular_scenario([1.0, 2.0, 3.0, 4.0], 64, noise_power=1e-3, seed=11)
        self.cfg = GameConfig(receiver=ReceiverKind.MF)

    def test_optimum_beats_neighbours(self):
        solution = mf_social_optimum(None, self.scenario, self.cfg)
        self.assertTrue(solution.feasible)
        target = nash_solve(self.scenario, self.cfg).target_sinr
        self.assertLess(solution.target_sinr, target)
        self.assertEqual(solution.sinrs, [solution.target_sinr] * 4)

        scorer = BalancedScorer(self.cfg)
        for sinr in (0.99 * solution.target_sinr, 1.01 * solution.target_sinr, target):
            self.assertLessEqual(scorer.score(sinr, mf_balanced_powers(sinr, self.scenario)), solution.objective * (1 + 1e-12))

    def test_optimum_beats_equilibrium(self):
        solution = mf_social_optimum(None, self.scenario, self.cfg)
        outcome = nash_solve(self.scenario, self.cfg)
        self.assertGreaterEqual(solution.objective, sum(outcome.utilities) * (1 - 1e-9))

    def test_single_node_reaches_target(self):
        scenario = cellular_scenario([2.0], 16, noise_power=1e-3, seed=5)
        solution = mf_social_optimum(None, scenario, self.cfg)
        self.assertTrue(solution.feasible)
        self.assertAlmostEqual(solution.target_sinr, nash_solve(scenario, self.cfg).target_sinr, places=6)
        self.assertAlmostEqual(solution.powers[0], solution.target_sinr * 1e-3 / 2.0, places=12)

    def test_dispatch(self):
        solution = social_optimum("mf", None, self.scenario, self.cfg)
        self.assertEqual(solution.receiver, ReceiverKind.MF)
        with self.assertRaises(ValueError):
            social_optimum("rake", None, self.scenario, self.cfg)

    def test_no_feasible_start(self):
        with patch("simulation.social.matched_filter._feasible", return_value=False):
            solution = mf_social_optimum(None, self.scenario, self.cfg)
        self.assertFalse(solution.feasible)
        self.assertIn("no feasible balanced SINR", solution.diagnostic)


if __name__ == '__main__':
    unittest.main()
