from typing import Optional

import numpy as np
from pydantic import BaseModel

from powergame.protocol import ReceiverKind
from simulation.network.spreading import SpreadingSet
from simulation.network.topology import Network


class ReceiverBank(BaseModel):
    """Filter coefficient vectors c_k as the columns of `filters`, c_k used at receiver `receivers[k]`."""

    kind: ReceiverKind
    filters: np.ndarray
    receivers: Optional[np.ndarray] = None

    class Config:
        arbitrary_types_allowed = True


def sinr_linear(c_k, k: int, powers, net: Network, spread: SpreadingSet) -> float:
    """Output SINR of node k's stream at receiver m(k) through the linear filter c_k."""
    c_k = np.asarray(c_k, dtype=float)
    if not np.any(c_k):
        raise ValueError("filter coefficients must not be all zero")
    powers = np.asarray(powers, dtype=float)
    projections = spread.sequences.T @ c_k
    received = powers * net.power_gains_at_receiver_of(k) * projections ** 2
    interference = np.sum(np.delete(received, k))
    return float(received[k] / (net.noise_power * (c_k @ c_k) + interference))
