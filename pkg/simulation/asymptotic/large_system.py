from typing import Callable, Optional, Sequence

import numpy as np
from pydantic import BaseModel, validator

from simulation import logger
from simulation.asymptotic.fixed_point import solve_fixed_point
from simulation.asymptotic.gain_laws import GainLaw, GainPairs, network_gain_laws, network_gain_pairs, zeta_source
from simulation.asymptotic.kernel import effective_interference
from simulation.errors import InfeasibleSinrError
from simulation.network.topology import Network, estimate_q

UNCERTAINTY_SIGMAS = 3.0


def network_sharing(network: Network) -> float:
    # a lone transmitter has no interferers; q never enters the load
    if network.node_count < 2:
        return 0.0
    return estimate_q(network)


class AsymptoticParams(BaseModel):
    """Large-system description: load K/N, sharing probability q, noise and the G/H gain laws.

    `pairs` optionally pins zeta to the (g, h) pairs of sampled networks instead of the laws.
    """

    load: float
    sharing: float
    noise_power: float
    primary_law: GainLaw
    interferer_law: GainLaw
    samples: int = 100000
    seed: int = 0
    pairs: Optional[GainPairs] = None

    class Config:
        arbitrary_types_allowed = True

    @validator("load")
    def load_nonnegative(cls, value):
        if value < 0:
            raise ValueError("load must be >= 0")
        return value

    @validator("sharing")
    def sharing_probability(cls, value):
        if not 0.0 <= value <= 1.0:
            raise ValueError("sharing must lie in [0, 1]")
        return value

    @validator("noise_power")
    def noise_positive(cls, value):
        if value <= 0:
            raise ValueError("noise_power must be > 0")
        return value

    @classmethod
    def from_networks(cls, networks: Sequence[Network], processing_gain: int, samples: int = 100000, seed: int = 0) -> "AsymptoticParams":
        """Load K/N, q averaged over the networks and zeta from their pooled gain pairs."""
        networks = list(networks)
        pooled = [network_gain_pairs(network) for network in networks]
        pairs = GainPairs(
            np.concatenate([p.interferer for p in pooled]),
            np.concatenate([p.primary for p in pooled]),
            exact=True,
            method="empirical",
        )
        interferer_law, primary_law = network_gain_laws(networks[0])
        return cls(
            load=networks[0].node_count / processing_gain,
            sharing=float(np.mean([network_sharing(network) for network in networks])),
            noise_power=networks[0].noise_power,
            primary_law=primary_law,
            interferer_law=interferer_law,
            samples=samples,
            seed=seed,
            pairs=pairs,
        )


class LargeSystem:
    """Asymptotic SINR machinery for one parameter set, with the gain samples drawn once so that
    zeta(gamma) is a deterministic function of gamma."""

    def __init__(self, params: AsymptoticParams):
        self.params = params
        if params.pairs is not None:
            self.zeta_source = params.pairs
        else:
            self.zeta_source = zeta_source(params.interferer_law, params.primary_law, params.samples, np.random.default_rng(params.seed))
        if isinstance(self.zeta_source, GainPairs) and params.pairs is None:
            self._primary, self._interferer = self.zeta_source.primary, self.zeta_source.interferer
        else:
            rng = np.random.default_rng([params.seed, 1])
            self._primary = params.primary_law.stratified(params.samples, rng)
            self._interferer = params.interferer_law.stratified(params.samples, rng)

    def zeta(self, sinr: float) -> float:
        return self.zeta_source.value(sinr)

    def zeta_slope(self, sinr: float) -> float:
        return self.zeta_source.slope(sinr)

    def interference_load(self, sinr: float) -> float:
        """beta gamma (q / (1 + gamma) + (1 - q) zeta(gamma)): the left side of the achievability condition."""
        p = self.params
        return p.load * sinr * (p.sharing / (1.0 + sinr) + (1.0 - p.sharing) * self.zeta(sinr))

    def received_power(self, sinr: float) -> float:
        """Common received power p h^2 of the minimum-power SINR-balanced MMSE allocation."""
        denominator = 1.0 - self.interference_load(sinr)
        if denominator <= 0:
            raise InfeasibleSinrError(f"SINR {sinr:.6g} is not achievable (interference load {1.0 - denominator:.6g} >= 1)", sinr)
        return sinr * self.params.noise_power / denominator


def _system(params) -> LargeSystem:
    return params if isinstance(params, LargeSystem) else LargeSystem(params)


def asymptotic_sinr_mf(power: float, primary_gain: float, params, expected_received_power: float) -> float:
    """gamma = p h^2 / (sigma^2 + beta E[p_j h_j^(m(j))^2])."""
    if expected_received_power < 0:
        raise ValueError("expected_received_power must be >= 0")
    p = params.params if isinstance(params, LargeSystem) else params
    return power * primary_gain / (p.noise_power + p.load * expected_received_power)


def asymptotic_sinr_de(power: float, primary_gain: float, params) -> float:
    """gamma = p h^2 (1 - beta) / sigma^2 below unit load, 0 at or above it."""
    p = params.params if isinstance(params, LargeSystem) else params
    if p.load >= 1.0:
        return 0.0
    return power * primary_gain * (1.0 - p.load) / p.noise_power


def asymptotic_sinr_mmse(power: float, primary_gain: float, params, power_law: Callable[[np.ndarray], np.ndarray]) -> float:
    """Large-system MMSE SINR of a user with received power p h^2 when interferers follow `power_law`.

    An interferer with primary gain H transmits power_law(H); with probability q it shares the
    user's receiver and arrives with power power_law(H) H, otherwise with power_law(H) G.
    """
    system = _system(params)
    p = system.params
    own = power * primary_gain
    if own <= 0:
        return 0.0
    interferer_power = np.asarray(power_law(system._primary), dtype=float)
    shared = interferer_power * system._primary
    other = interferer_power * system._interferer

    def mapping(sinr):
        load = p.sharing * np.mean(effective_interference(shared, own, sinr))
        load += (1.0 - p.sharing) * np.mean(effective_interference(other, own, sinr))
        return own / (p.noise_power + p.load * load)

    return solve_fixed_point(mapping, own / p.noise_power)


class Achievability(BaseModel):
    lhs: float
    achievable: bool
    stderr: float
    uncertain: bool


def achievable(sinr: float, params) -> Achievability:
    """beta gamma q / (1 + gamma) + beta gamma (1 - q) E[G / (H + gamma G)] < 1."""
    if sinr <= 0:
        raise ValueError("sinr must be > 0")
    system = _system(params)
    p = system.params
    lhs = system.interference_load(sinr)
    stderr = p.load * sinr * (1.0 - p.sharing) * system.zeta_source.stderr(sinr)
    uncertain = abs(1.0 - lhs) <= UNCERTAINTY_SIGMAS * stderr
    if uncertain:
        logger.warning("Achievability within estimator noise", sinr=sinr, lhs=lhs, stderr=stderr)
    return Achievability(lhs=lhs, achievable=lhs < 1.0, stderr=stderr, uncertain=uncertain)


def min_power_mmse(primary_gain, sinr: float, params):
    """Minimum power reaching `sinr` for every user: received power kappa(gamma) over the primary gain."""
    return _system(params).received_power(sinr) / np.asarray(primary_gain, dtype=float)


def finite_mmse_sinr_approx(k: int, powers, net: Network, processing_gain: int) -> float:
    """Large-system approximation of user k's MMSE SINR that needs no spreading sequences."""
    powers = np.asarray(powers, dtype=float)
    gains = net.power_gains_at_receiver_of(k)
    own = powers[k] * gains[k]
    interferers = np.delete(powers * gains, k)
    interferers = interferers[interferers > 0]
    if own <= 0:
        return 0.0

    def mapping(sinr):
        return own / (net.noise_power + np.sum(effective_interference(interferers, own, sinr)) / processing_gain)

    return solve_fixed_point(mapping, own / net.noise_power)
