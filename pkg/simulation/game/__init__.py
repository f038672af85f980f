from simulation.game.efficiency import EfficiencyFunction
from simulation.game.nash import NashSolver, best_response_power, deviation_gains, mmse_maximality_gap, nash_solve, solve_game, utilities
