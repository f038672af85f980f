import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve
from scipy.optimize import brentq

from powergame.protocol import ReceiverKind
from simulation.errors import SolverError
from simulation.network.spreading import SpreadingSet
from simulation.network.topology import Network
from simulation.receivers.abstract_receiver import Receiver


def interference_weights(k: int, powers, net: Network) -> np.ndarray:
    """p_j h_j^(m(k))^2 for j != k, zero for k itself."""
    weights = np.asarray(powers, dtype=float) * net.power_gains_at_receiver_of(k)
    weights[k] = 0.0
    return weights


def interference_covariance(k: int, powers, net: Network, spread: SpreadingSet) -> np.ndarray:
    """A_k = sigma^2 I + sum_{j != k} p_j h_j^(m(k))^2 s_j s_j^T."""
    weights = interference_weights(k, powers, net)
    sequences = spread.sequences
    covariance = (sequences * weights) @ sequences.T
    covariance[np.diag_indices_from(covariance)] += net.noise_power
    return covariance


def factor_covariance(covariance: np.ndarray):
    try:
        return cho_factor(covariance)
    except LinAlgError:
        raise SolverError("Cholesky factorization of the interference covariance failed", np.linalg.cond(covariance))


def mmse_filter(k: int, powers, net: Network, spread: SpreadingSet, factor=None) -> np.ndarray:
    if factor is None:
        factor = factor_covariance(interference_covariance(k, powers, net, spread))
    s_k = spread.sequences[:, k]
    whitened = cho_solve(factor, s_k)
    received = powers[k] * net.power_gains_at_receiver_of(k)[k]
    if received <= 0:
        return whitened
    return np.sqrt(received) / (1.0 + received * (s_k @ whitened)) * whitened


def sinr_mmse(k: int, powers, net: Network, spread: SpreadingSet, factor=None) -> float:
    if factor is None:
        factor = factor_covariance(interference_covariance(k, powers, net, spread))
    s_k = spread.sequences[:, k]
    return float(powers[k] * net.power_gains_at_receiver_of(k)[k] * (s_k @ cho_solve(factor, s_k)))


class MMSEReceiver(Receiver):
    kind = ReceiverKind.MMSE

    def __init__(self, scenario):
        super().__init__(scenario)
        self._factors = {}

    def factor(self, k, powers):
        """Cholesky factor of A_k, reused while the interferers' weights are unchanged."""
        weights = interference_weights(k, powers, self.network)
        key = weights.tobytes()
        cached = self._factors.get(k)
        if cached is not None and cached[0] == key:
            return cached[1]
        factor = factor_covariance(interference_covariance(k, powers, self.network, self.spreading))
        self._factors[k] = (key, factor)
        return factor

    def filter(self, k, powers):
        return mmse_filter(k, np.asarray(powers, dtype=float), self.network, self.spreading, self.factor(k, powers))

    def sinr(self, k, powers):
        return sinr_mmse(k, np.asarray(powers, dtype=float), self.network, self.spreading, self.factor(k, powers))

    def best_response_power(self, k, powers, target_sinr, max_power):
        factor = self.factor(k, powers)
        trial = np.array(powers, dtype=float)

        def excess(power):
            trial[k] = power
            return sinr_mmse(k, trial, self.network, self.spreading, factor) - target_sinr

        # the SINR grows monotonically in own power, so the cap check brackets the root
        if excess(max_power) <= 0:
            return max_power, True
        power = brentq(excess, 0.0, max_power, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
        return power, False
