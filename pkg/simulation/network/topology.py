from typing import List

import numpy as np
from pydantic import BaseModel

from powergame.protocol import GainModel, NetworkConfig
from simulation import logger
from simulation.errors import CoincidentNodesError, RoutingError

MAX_REGENERATIONS = 100


class Network(BaseModel):
    """Positions, next-hop routing and amplitude gains of one multi-hop scenario.

    Receiver indices run over 0..K, where K is the access point. `gains[k, m]` is the
    amplitude gain from transmitter k to receiver m; `gains[k, k]` is 0 because a
    receiving node does not transmit while it receives.
    """

    positions: np.ndarray
    access_point: np.ndarray
    next_hop: np.ndarray
    gains: np.ndarray
    noise_power: float

    class Config:
        arbitrary_types_allowed = True

    @property
    def node_count(self) -> int:
        return int(self.positions.shape[0])

    @property
    def access_point_index(self) -> int:
        return self.node_count

    @property
    def power_gains(self) -> np.ndarray:
        return self.gains ** 2

    def primary_power_gains(self) -> np.ndarray:
        """h_k^(m(k))^2 for every transmitter k."""
        return self.power_gains[np.arange(self.node_count), self.next_hop]

    def power_gains_at_receiver_of(self, k: int) -> np.ndarray:
        """h_j^(m(k))^2 for every transmitter j."""
        return self.power_gains[:, self.next_hop[k]]

    def route(self, k: int) -> List[int]:
        path = [k]
        node = k
        for _ in range(self.node_count):
            node = int(self.next_hop[node])
            path.append(node)
            if node == self.access_point_index:
                return path
        raise RoutingError(f"Route from node {k} does not reach the access point in {self.node_count} hops")


def _distances_to_receivers(positions, access_point):
    receivers = np.vstack([positions, access_point[None, :]])
    return np.linalg.norm(positions[:, None, :] - receivers[None, :, :], axis=-1)


def generate_topology(cfg: NetworkConfig, rng: np.random.Generator = None) -> Network:
    """Uniform positions in the square around a central access point, routed toward the access point.

    Each node transmits to the closest node that is strictly closer to the access point,
    or to the access point when that is closest. Ties go to the lowest index.
    """
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    k_nodes = cfg.node_count
    positions = rng.uniform(0.0, cfg.area_side, size=(k_nodes, 2))
    access_point = np.array([cfg.area_side / 2.0, cfg.area_side / 2.0])

    distances = _distances_to_receivers(positions, access_point)
    to_access_point = distances[:, k_nodes]
    next_hop = np.empty(k_nodes, dtype=int)
    for k in range(k_nodes):
        closer = to_access_point < to_access_point[k]
        candidates = np.where(closer, distances[k, :k_nodes], np.inf)
        candidates = np.append(candidates, to_access_point[k])
        next_hop[k] = int(np.argmin(candidates))

    return Network(
        positions=positions,
        access_point=access_point,
        next_hop=next_hop,
        gains=np.zeros((k_nodes, k_nodes + 1)),
        noise_power=cfg.noise_power,
    )


def sample_gains(net: Network, cfg: NetworkConfig, rng: np.random.Generator) -> Network:
    """Draw Rayleigh amplitude gains with mean coefficient * d^-exponent for every transmitter/receiver pair."""
    k_nodes = net.node_count
    distances = _distances_to_receivers(net.positions, net.access_point)
    off_self = np.ones_like(distances, dtype=bool)
    off_self[np.arange(k_nodes), np.arange(k_nodes)] = False

    coincident = np.argwhere(off_self & (distances == 0.0))
    if len(coincident):
        raise CoincidentNodesError([tuple(int(i) for i in pair) for pair in coincident])

    safe = np.where(off_self, distances, 1.0)
    mean = cfg.gain_mean_coefficient * safe ** (-cfg.gain_exponent)
    # a Rayleigh law with mean mu has scale mu * sqrt(2 / pi)
    draws = rng.rayleigh(scale=mean * np.sqrt(2.0 / np.pi))
    if cfg.gain_model == GainModel.POWER:
        draws = np.sqrt(draws)
    gains = np.where(off_self, draws, 0.0)
    return net.copy(update={"gains": gains})


def generate_network(cfg: NetworkConfig, rng: np.random.Generator = None) -> Network:
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    for attempt in range(MAX_REGENERATIONS):
        topology = generate_topology(cfg, rng)
        try:
            return sample_gains(topology, cfg, rng)
        except CoincidentNodesError as e:
            logger.warning("Regenerating topology", seed=cfg.seed, attempt=attempt, pairs=len(e.pairs))
    raise RoutingError(f"Could not place {cfg.node_count} distinct nodes after {MAX_REGENERATIONS} attempts")


def estimate_q(net: Network) -> float:
    """Fraction of ordered pairs (j, k), j != k, that share a receiver."""
    k_nodes = net.node_count
    if k_nodes < 2:
        raise RoutingError("Sharing probability needs at least two nodes")
    _, counts = np.unique(net.next_hop, return_counts=True)
    return float(np.sum(counts * (counts - 1)) / (k_nodes * (k_nodes - 1)))
