import numpy as np

from powergame.protocol import ReceiverKind
from simulation.network.spreading import SpreadingSet
from simulation.network.topology import Network
from simulation.receivers.abstract_receiver import Receiver


def sinr_mf(k: int, powers, net: Network, spread: SpreadingSet) -> float:
    powers = np.asarray(powers, dtype=float)
    received = powers * net.power_gains_at_receiver_of(k) * spread.rho[k] ** 2
    interference = np.sum(np.delete(received, k))
    return float(received[k] / (net.noise_power + interference))


class MatchedFilterReceiver(Receiver):
    kind = ReceiverKind.MF

    def filter(self, k, powers):
        return self.spreading.sequences[:, k].copy()

    def sinr(self, k, powers):
        return sinr_mf(k, powers, self.network, self.spreading)

    def sinrs(self, powers, workers=1):
        powers = np.asarray(powers, dtype=float)
        net = self.network
        # gains[j, k] = h_j^(m(k))^2
        gains = net.power_gains[:, net.next_hop]
        received = powers[:, None] * gains * self.spreading.rho ** 2
        own = np.diag(received)
        interference = received.sum(axis=0) - own
        return own / (net.noise_power + interference)
