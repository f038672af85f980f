import json
from pathlib import Path

import numpy as np
from pydantic import BaseModel

from powergame.protocol import NetworkConfig, VERSION
from simulation.network.spreading import SpreadingSet, generate_spreading
from simulation.network.topology import Network, generate_network
from simulation.utils import derive_seed


class Scenario(BaseModel):
    """One replayable physical scenario: a routed network plus a spreading set."""

    config: NetworkConfig
    network: Network
    spreading: SpreadingSet

    class Config:
        arbitrary_types_allowed = True

    @property
    def node_count(self) -> int:
        return self.network.node_count

    @property
    def processing_gain(self) -> int:
        return self.spreading.processing_gain

    @property
    def noise_power(self) -> float:
        return self.network.noise_power

    def to_dict(self) -> dict:
        return {
            "version": VERSION,
            "config": json.loads(self.config.json()),
            "positions": self.network.positions.tolist(),
            "access_point": self.network.access_point.tolist(),
            "next_hop": self.network.next_hop.tolist(),
            "gains": self.network.gains.tolist(),
            "sequences": self.spreading.sequences.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        config = NetworkConfig(**data["config"])
        network = Network(
            positions=np.asarray(data["positions"], dtype=float),
            access_point=np.asarray(data["access_point"], dtype=float),
            next_hop=np.asarray(data["next_hop"], dtype=int),
            gains=np.asarray(data["gains"], dtype=float),
            noise_power=config.noise_power,
        )
        sequences = np.asarray(data["sequences"], dtype=float)
        signs = np.sign(sequences).astype(np.int8)
        if np.array_equal(sequences, signs / np.sqrt(sequences.shape[0])):
            spreading = SpreadingSet.from_signs(signs)
        else:
            spreading = SpreadingSet.from_sequences(sequences)
        return cls(config=config, network=network, spreading=spreading)

    @classmethod
    def from_json(cls, text: str) -> "Scenario":
        return cls.from_dict(json.loads(text))

    def save(self, path):
        Path(path).write_text(self.to_json())

    @classmethod
    def load(cls, path) -> "Scenario":
        return cls.from_json(Path(path).read_text())


def generate_scenario(cfg: NetworkConfig, processing_gain: int, spreading_seed: int = None, network: Network = None) -> Scenario:
    """Network from `cfg.seed` (or the one given) and a spreading set from `spreading_seed`."""
    if network is None:
        network = generate_network(cfg)
    if spreading_seed is None:
        spreading_seed = derive_seed(cfg.seed, processing_gain)
    spreading = generate_spreading(network.node_count, processing_gain, np.random.default_rng(spreading_seed))
    return Scenario(config=cfg, network=network, spreading=spreading)


def custom_scenario(power_gains, next_hop, processing_gain: int, noise_power: float = 1.0, seed: int = 0, spreading: SpreadingSet = None) -> Scenario:
    """Scenario with prescribed power gains h^2 (K x K+1) and routing; positions are placeholders."""
    power_gains = np.asarray(power_gains, dtype=float)
    k_nodes = power_gains.shape[0]
    gains = np.sqrt(power_gains)
    gains[np.arange(k_nodes), np.arange(k_nodes)] = 0.0
    network = Network(
        positions=np.zeros((k_nodes, 2)),
        access_point=np.zeros(2),
        next_hop=np.asarray(next_hop, dtype=int),
        gains=gains,
        noise_power=noise_power,
    )
    if spreading is None:
        spreading = generate_spreading(k_nodes, processing_gain, np.random.default_rng(seed))
    config = NetworkConfig(node_count=k_nodes, noise_power=noise_power, seed=seed)
    return Scenario(config=config, network=network, spreading=spreading)


def cellular_scenario(primary_power_gains, processing_gain: int, noise_power: float = 1.0, seed: int = 0, spreading: SpreadingSet = None) -> Scenario:
    """Every node transmits straight to the access point with the given power gain."""
    primary_power_gains = np.asarray(primary_power_gains, dtype=float)
    k_nodes = primary_power_gains.size
    power_gains = np.ones((k_nodes, k_nodes + 1))
    power_gains[:, k_nodes] = primary_power_gains
    return custom_scenario(power_gains, np.full(k_nodes, k_nodes), processing_gain, noise_power, seed, spreading)
