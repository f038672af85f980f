import numpy as np

from powergame.protocol import BalancedSolution, GameConfig, ReceiverKind
from simulation import logger
from simulation.errors import SolverError
from simulation.game.nash import nash_solve
from simulation.network.scenario import Scenario
from simulation.social.objective import BalancedScorer, weighted_objective

SCAN_SPAN = 0.5
SCAN_POINTS = 201


def de_social_optimum(weights, scenario: Scenario, cfg: GameConfig) -> BalancedSolution:
    """Decorrelator social optimum: the noncooperative equilibrium itself.

    Decorrelator SINRs do not depend on the other nodes' powers, so balanced powers scale as
    gamma / slope_k and the objective is f(gamma)/gamma times a constant, maximized at the target SINR.
    """
    outcome = nash_solve(scenario, cfg.copy(update={"receiver": ReceiverKind.DE}))
    scorer = BalancedScorer(cfg, weights)
    target = outcome.target_sinr
    powers = np.asarray(outcome.powers)
    if outcome.capped:
        logger.warning("Decorrelator equilibrium has capped nodes", capped=len(outcome.capped), node_count=scenario.node_count)

    # powers at gamma are gamma / target times the equilibrium powers
    scan = target * np.linspace(1.0 - SCAN_SPAN, 1.0 + SCAN_SPAN, SCAN_POINTS)
    scores = np.array([scorer.score(sinr, powers * sinr / target) for sinr in scan])
    at_target = scorer.score(target, powers)
    if np.max(scores) > at_target * (1.0 + 1e-12):
        best = float(scan[np.argmax(scores)])
        raise SolverError(f"Decorrelator objective peaks at SINR {best:.6g}, not at the target {target:.6g}")

    return BalancedSolution(
        receiver=ReceiverKind.DE,
        feasible=True,
        target_sinr=target,
        powers=outcome.powers,
        sinrs=outcome.sinrs,
        objective=weighted_objective(powers, outcome.sinrs, weights, cfg, scorer.efficiency),
    )
