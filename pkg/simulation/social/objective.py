from typing import Optional, Sequence

import numpy as np

from powergame.protocol import GameConfig
from simulation import logger
from simulation.game.efficiency import EfficiencyFunction
from simulation.game.nash import utilities


def default_weights(node_count: int) -> np.ndarray:
    return np.ones(node_count)


def check_weights(weights, node_count: int) -> np.ndarray:
    if weights is None:
        return default_weights(node_count)
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (node_count,):
        raise ValueError(f"expected {node_count} weights, got {weights.shape}")
    if np.any(weights < 0) or not np.any(weights > 0):
        raise ValueError("weights must be nonnegative and not all zero")
    return weights


def weighted_objective(powers, sinrs, weights, cfg: GameConfig, efficiency: EfficiencyFunction = None) -> float:
    """sum_k alpha_k u_k with u_k = (L/M) R f(gamma_k) / p_k."""
    powers = np.asarray(powers, dtype=float)
    weights = check_weights(weights, powers.size)
    return float(np.dot(weights, utilities(powers, sinrs, cfg, efficiency)))


class BalancedScorer:
    """Weighted objective of SINR-balanced allocations, where every node sits at the same SINR."""

    def __init__(self, cfg: GameConfig, weights: Optional[Sequence[float]] = None, efficiency: EfficiencyFunction = None):
        self.cfg = cfg
        self.weights = None if weights is None else np.asarray(weights, dtype=float)
        self.efficiency = efficiency or EfficiencyFunction(cfg.packet_bits)

    @property
    def throughput_scale(self) -> float:
        return self.cfg.info_bits / self.cfg.packet_bits * self.cfg.rate

    def inverse_power_sum(self, powers) -> float:
        powers = np.asarray(powers, dtype=float)
        weights = check_weights(self.weights, powers.size)
        return float(np.sum(weights / powers))

    def score(self, sinr: float, powers) -> float:
        return self.throughput_scale * float(self.efficiency(sinr)) * self.inverse_power_sum(powers)

    def log_score(self, sinr: float, powers) -> float:
        """log of the objective up to the constant (L/M) R; stays finite where f(gamma) underflows."""
        return float(self.efficiency.log_value(sinr)) + np.log(self.inverse_power_sum(powers))

    def log_score_slope(self, sinr: float, powers, power_slopes) -> float:
        """d/dgamma of log(f(gamma) sum_k alpha_k / p_k(gamma))."""
        powers = np.asarray(powers, dtype=float)
        weights = check_weights(self.weights, powers.size)
        inverse = np.sum(weights / powers)
        return float(self.efficiency.log_derivative(sinr)) - float(np.sum(weights * np.asarray(power_slopes) / powers ** 2)) / inverse

    def log_outcome(self, receiver, sinr, powers):
        logger.info("Balanced objective", receiver=receiver, sinr=sinr, objective=self.score(sinr, powers), max_power=float(np.max(powers)))
