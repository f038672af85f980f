from concurrent.futures import ThreadPoolExecutor

import numpy as np

from powergame.protocol import GameConfig, GameOutcome, ReceiverKind
from simulation import logger
from simulation.game.efficiency import EfficiencyFunction
from simulation.network.scenario import Scenario
from simulation.receivers.abstract_receiver import Receiver
from simulation.receivers.factory import ReceiverFactory
from simulation.receivers.linear import sinr_linear

MONOTONE_SLACK = 1e-9


def utilities(powers, sinrs, cfg: GameConfig, efficiency: EfficiencyFunction = None) -> np.ndarray:
    """u_k = (L/M) R f(gamma_k) / p_k in bits per joule, 0 where p_k = 0."""
    if efficiency is None:
        efficiency = EfficiencyFunction(cfg.packet_bits)
    powers = np.asarray(powers, dtype=float)
    throughput = cfg.info_bits / cfg.packet_bits * cfg.rate * efficiency(sinrs)
    return np.divide(throughput, powers, out=np.zeros_like(powers), where=powers > 0)


def best_response_power(k: int, powers, receiver: Receiver, target_sinr: float, max_power: float):
    """min(P_max, p*) where p* brings node k to the target SINR; also reports whether the cap bound."""
    return receiver.best_response_power(k, powers, target_sinr, max_power)


class NashSolver:
    """Synchronous best-response sweeps from all-zero powers to the game's fixed point.

    `target_sinr` replaces the equilibrium target; the sweeps then return the minimum powers
    that balance every node at that SINR.
    """

    def __init__(self, scenario: Scenario, cfg: GameConfig, target_sinr: float = None):
        self.scenario = scenario
        self.cfg = cfg
        self.efficiency = EfficiencyFunction(cfg.packet_bits)
        self.target_sinr = self.efficiency.target_sinr() if target_sinr is None else target_sinr
        self.receiver = ReceiverFactory.create_receiver(cfg.receiver, scenario)

    def sweep(self, powers):
        def respond(k):
            return best_response_power(k, powers, self.receiver, self.target_sinr, self.cfg.max_power)

        nodes = range(self.scenario.node_count)
        if self.cfg.workers > 1:
            with ThreadPoolExecutor(max_workers=self.cfg.workers) as executor:
                responses = list(executor.map(respond, nodes))
        else:
            responses = [respond(k) for k in nodes]
        new_powers = np.array([power for power, _ in responses])
        capped = [k for k, (_, is_capped) in enumerate(responses) if is_capped]
        return new_powers, capped

    def solve(self) -> GameOutcome:
        cfg = self.cfg
        powers = np.zeros(self.scenario.node_count)
        capped = []
        converged = False
        monotone = True
        iterations = 0

        for sweep_index in range(1, cfg.max_iterations + 1):
            new_powers, capped = self.sweep(powers)
            change = np.max(np.abs(new_powers - powers) / np.maximum(powers, cfg.power_floor))
            if sweep_index > 1 and np.any(new_powers < powers * (1.0 - MONOTONE_SLACK)):
                if monotone:
                    logger.warning("Best-response sweep is not monotone", receiver=cfg.receiver.value, sweep=sweep_index)
                monotone = False
            powers = new_powers
            if change <= cfg.tolerance:
                converged = True
                break
            iterations = sweep_index

        sinrs = self.receiver.sinrs(powers, workers=cfg.workers)
        outcome = GameOutcome(
            receiver=cfg.receiver,
            powers=powers.tolist(),
            sinrs=sinrs.tolist(),
            utilities=utilities(powers, sinrs, cfg, self.efficiency).tolist(),
            target_sinr=self.target_sinr,
            converged=converged,
            iterations=iterations,
            capped=capped,
            monotone=monotone,
        )
        if converged:
            logger.info("Nash sweep converged", receiver=cfg.receiver.value, iterations=iterations, capped=len(capped))
        else:
            logger.warning("Nash sweep did not converge", receiver=cfg.receiver.value, iterations=iterations, last_change=float(change))
        return outcome


def nash_solve(scenario: Scenario, cfg: GameConfig) -> GameOutcome:
    return NashSolver(scenario, cfg).solve()


def solve_game(scenario: Scenario, cfg: GameConfig) -> GameOutcome:
    """Game with free receiver choice: every node ends on the MMSE receiver, so solve that fixed-receiver game."""
    return nash_solve(scenario, cfg.copy(update={"receiver": ReceiverKind.MMSE}))


def deviation_gains(scenario: Scenario, outcome: GameOutcome, cfg: GameConfig, grid_points: int = 1000) -> np.ndarray:
    """Largest relative utility gain each node could get by moving alone to a power on a grid over [0, P_max]."""
    receiver = ReceiverFactory.create_receiver(outcome.receiver, scenario)
    efficiency = EfficiencyFunction(cfg.packet_bits)
    powers = np.asarray(outcome.powers)
    equilibrium = utilities(powers, outcome.sinrs, cfg, efficiency)
    grid = np.linspace(0.0, cfg.max_power, grid_points + 1)[1:]
    gains = np.zeros(len(powers))
    for k in range(len(powers)):
        slope = receiver.sinr_slope(k, powers)
        deviation = utilities(grid, slope * grid, cfg, efficiency)
        best = np.max(deviation)
        if equilibrium[k] > 0:
            gains[k] = (best - equilibrium[k]) / equilibrium[k]
        else:
            gains[k] = np.inf if best > 0 else 0.0
    return gains


def mmse_maximality_gap(scenario: Scenario, outcome: GameOutcome, trials: int = 1000, rng: np.random.Generator = None) -> float:
    """Best SINR ratio any random unit-norm filter reaches against the MMSE filter at the outcome's powers.

    Values at or below 1 mean no alternative filter beats the MMSE receiver.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    receiver = ReceiverFactory.create_receiver(ReceiverKind.MMSE, scenario)
    powers = np.asarray(outcome.powers)
    worst = 0.0
    for k in range(scenario.node_count):
        reference = receiver.sinr(k, powers)
        filters = rng.standard_normal((trials, scenario.processing_gain))
        filters /= np.linalg.norm(filters, axis=1, keepdims=True)
        best = max(sinr_linear(c, k, powers, scenario.network, scenario.spreading) for c in filters)
        worst = max(worst, best / reference)
    return worst
