from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from typing import Tuple

import numpy as np

from powergame.protocol import ReceiverKind
from simulation.network.scenario import Scenario
from simulation.receivers.linear import ReceiverBank, sinr_linear


class Receiver(ABC):
    kind: ReceiverKind = None

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.network = scenario.network
        self.spreading = scenario.spreading

    @abstractmethod
    def filter(self, k: int, powers) -> np.ndarray:
        ...

    def sinr(self, k: int, powers) -> float:
        return sinr_linear(self.filter(k, powers), k, powers, self.network, self.spreading)

    def sinrs(self, powers, workers: int = 1) -> np.ndarray:
        powers = np.asarray(powers, dtype=float)
        nodes = range(self.network.node_count)
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as executor:
                return np.fromiter(executor.map(lambda k: self.sinr(k, powers), nodes), dtype=float)
        return np.array([self.sinr(k, powers) for k in nodes])

    def bank(self, powers) -> ReceiverBank:
        filters = np.column_stack([self.filter(k, powers) for k in range(self.network.node_count)])
        return ReceiverBank(kind=self.kind, filters=filters, receivers=self.network.next_hop.copy())

    def sinr_slope(self, k: int, powers) -> float:
        """SINR per watt of own power; the SINR is linear in p_k for every receiver here."""
        unit = np.array(powers, dtype=float)
        unit[k] = 1.0
        return self.sinr(k, unit)

    def best_response_power(self, k: int, powers, target_sinr: float, max_power: float) -> Tuple[float, bool]:
        """Power that brings node k to `target_sinr` against the others' `powers`, capped at `max_power`.

        Returns the power and whether the cap was applied.
        """
        slope = self.sinr_slope(k, powers)
        if not np.isfinite(slope) or slope <= 0:
            return max_power, True
        required = target_sinr / slope
        if required > max_power:
            return max_power, True
        return required, False
