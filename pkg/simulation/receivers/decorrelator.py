import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from powergame.protocol import ReceiverKind
from simulation.errors import ReceiverError, SingularSpreadingError
from simulation.network.spreading import SpreadingSet
from simulation.network.topology import Network
from simulation.receivers.abstract_receiver import Receiver
from simulation.receivers.linear import ReceiverBank


def decorrelator_bank(spread: SpreadingSet) -> ReceiverBank:
    """C = S (S^T S)^-1, so that c_k^T s_j = delta_kj."""
    k_nodes, processing_gain = spread.size, spread.processing_gain
    if k_nodes > processing_gain:
        raise ReceiverError(f"Decorrelator requires K <= N, got K={k_nodes}, N={processing_gain}")
    if np.linalg.matrix_rank(spread.sequences) < k_nodes:
        raise SingularSpreadingError("S^T S is singular: spreading sequences are linearly dependent")
    try:
        gram = cho_factor(spread.sequences.T @ spread.sequences)
    except LinAlgError as e:
        raise SingularSpreadingError(f"S^T S is not positive definite: {e}")
    filters = spread.sequences @ cho_solve(gram, np.eye(k_nodes))
    return ReceiverBank(kind=ReceiverKind.DE, filters=filters)


def sinr_de(k: int, powers, net: Network, spread: SpreadingSet, bank: ReceiverBank = None) -> float:
    if bank is None:
        bank = decorrelator_bank(spread)
    c_k = bank.filters[:, k]
    return float(powers[k] * net.power_gains_at_receiver_of(k)[k] / (net.noise_power * (c_k @ c_k)))


class DecorrelatorReceiver(Receiver):
    kind = ReceiverKind.DE

    def __init__(self, scenario):
        super().__init__(scenario)
        self.decorrelator = decorrelator_bank(self.spreading)
        self.noise_enhancement = np.sum(self.decorrelator.filters ** 2, axis=0)

    def filter(self, k, powers):
        return self.decorrelator.filters[:, k].copy()

    def sinr(self, k, powers):
        return sinr_de(k, powers, self.network, self.spreading, self.decorrelator)

    def sinrs(self, powers, workers=1):
        powers = np.asarray(powers, dtype=float)
        return powers * self.network.primary_power_gains() / (self.network.noise_power * self.noise_enhancement)
