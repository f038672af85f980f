from abc import ABC, abstractmethod

import numpy as np
from pydantic import BaseModel
from scipy import stats
from scipy.integrate import quad

from simulation.network.topology import Network


class GainLaw(ABC):
    """Distribution of a power gain h^2."""

    @abstractmethod
    def ppf(self, u) -> np.ndarray:
        ...

    @property
    @abstractmethod
    def mean(self) -> float:
        ...

    def sample(self, size: int, rng: np.random.Generator) -> np.ndarray:
        return self.ppf(rng.uniform(size=size))

    def stratified(self, size: int, rng: np.random.Generator) -> np.ndarray:
        """One draw per equal-probability stratum, returned in random order."""
        u = (np.arange(size) + rng.uniform(size=size)) / size
        return self.ppf(rng.permutation(u))


class PointMass(GainLaw):
    def __init__(self, value: float):
        self.value = float(value)

    def ppf(self, u):
        return np.full(np.shape(u), self.value)

    @property
    def mean(self):
        return self.value


class ExponentialLaw(GainLaw):
    """Power gain of a Rayleigh amplitude: exponential with the given mean."""

    def __init__(self, mean: float):
        self._mean = float(mean)
        self.law = stats.expon(scale=self._mean)

    @classmethod
    def from_rayleigh_amplitude_mean(cls, amplitude_mean: float) -> "ExponentialLaw":
        # E[h^2] = 2 sigma_R^2 with sigma_R = mu sqrt(2 / pi)
        return cls(4.0 * amplitude_mean ** 2 / np.pi)

    def ppf(self, u):
        return self.law.ppf(u)

    @property
    def mean(self):
        return self._mean


class EmpiricalLaw(GainLaw):
    def __init__(self, values):
        self.values = np.sort(np.asarray(values, dtype=float))
        if self.values.size == 0:
            raise ValueError("empirical law needs at least one value")

    def ppf(self, u):
        index = np.minimum((np.asarray(u) * self.values.size).astype(int), self.values.size - 1)
        return self.values[index]

    @property
    def mean(self):
        return float(np.mean(self.values))


class ZetaEstimate(BaseModel):
    value: float
    stderr: float
    method: str


class GainPairs:
    """Interferer/primary power-gain pairs (g, h) over which zeta(gamma) = E[g / (h + gamma g)] is averaged.

    `exact` pairs enumerate a whole network, so their mean carries no sampling error.
    """

    def __init__(self, interferer, primary, exact: bool = False, method: str = "monte_carlo"):
        self.interferer = np.asarray(interferer, dtype=float)
        self.primary = np.asarray(primary, dtype=float)
        self.exact = exact
        self.method = method

    def __len__(self):
        return self.interferer.size

    def terms(self, sinr):
        return self.interferer / (self.primary + sinr * self.interferer)

    def value(self, sinr) -> float:
        # no pairs: every transmitter shares one receiver, so zeta never enters
        if len(self) == 0:
            return 0.0
        return float(np.mean(self.terms(sinr)))

    def slope(self, sinr) -> float:
        if len(self) == 0:
            return 0.0
        return float(-np.mean(self.terms(sinr) ** 2))

    def stderr(self, sinr) -> float:
        if self.exact or len(self) < 2:
            return 0.0
        return float(np.std(self.terms(sinr), ddof=1) / np.sqrt(len(self)))

    def estimate(self, sinr) -> ZetaEstimate:
        return ZetaEstimate(value=self.value(sinr), stderr=self.stderr(sinr), method=self.method)


class ClosedFormZeta:
    """zeta for point masses (exact) or two exponential laws (quadrature over the ratio H/G)."""

    def __init__(self, interferer_law: GainLaw, primary_law: GainLaw):
        self.interferer_law = interferer_law
        self.primary_law = primary_law

    @staticmethod
    def supports(interferer_law, primary_law) -> bool:
        both_points = isinstance(interferer_law, PointMass) and isinstance(primary_law, PointMass)
        both_exponential = isinstance(interferer_law, ExponentialLaw) and isinstance(primary_law, ExponentialLaw)
        return both_points or both_exponential

    def _ratio_moment(self, sinr, power):
        # for independent exponentials, R = H/G has P(R > t) = 1 / (1 + a t) with a = E[G]/E[H]
        a = self.interferer_law.mean / self.primary_law.mean
        if sinr <= 0:
            return np.inf
        integral, _ = quad(lambda t: a / (1.0 + a * t) ** 2 / (t + sinr) ** power, 0.0, np.inf, epsabs=1e-15, epsrel=1e-12, limit=500)
        return integral

    def value(self, sinr) -> float:
        if isinstance(self.interferer_law, PointMass):
            g, h = self.interferer_law.value, self.primary_law.value
            return g / (h + sinr * g)
        return float(self._ratio_moment(sinr, 1))

    def slope(self, sinr) -> float:
        if isinstance(self.interferer_law, PointMass):
            g, h = self.interferer_law.value, self.primary_law.value
            return -(g / (h + sinr * g)) ** 2
        return float(-self._ratio_moment(sinr, 2))

    def stderr(self, sinr) -> float:
        return 0.0

    def estimate(self, sinr) -> ZetaEstimate:
        method = "closed_form" if isinstance(self.interferer_law, PointMass) else "quadrature"
        return ZetaEstimate(value=self.value(sinr), stderr=0.0, method=method)


def draw_gain_pairs(interferer_law: GainLaw, primary_law: GainLaw, samples: int, rng: np.random.Generator) -> GainPairs:
    """Independent stratified draws of G and H."""
    return GainPairs(interferer_law.stratified(samples, rng), primary_law.stratified(samples, rng))


def zeta_source(interferer_law: GainLaw, primary_law: GainLaw, samples: int = 100000, rng: np.random.Generator = None):
    if ClosedFormZeta.supports(interferer_law, primary_law):
        return ClosedFormZeta(interferer_law, primary_law)
    if rng is None:
        rng = np.random.default_rng(0)
    return draw_gain_pairs(interferer_law, primary_law, samples, rng)


def zeta(sinr: float, interferer_law: GainLaw, primary_law: GainLaw, samples: int = 100000, rng: np.random.Generator = None) -> ZetaEstimate:
    """E[G / (H + gamma G)] for independent laws, with a standard error for sampled estimates."""
    if sinr < 0:
        raise ValueError("sinr must be >= 0")
    return zeta_source(interferer_law, primary_law, samples, rng).estimate(sinr)


def network_gain_pairs(network: Network) -> GainPairs:
    """(h_j^(m(k))^2, h_j^(m(j))^2) over ordered pairs j != k whose receivers differ, skipping j = m(k)."""
    k_nodes = network.node_count
    next_hop = network.next_hop
    power_gains = network.power_gains
    j, k = np.meshgrid(np.arange(k_nodes), np.arange(k_nodes), indexing="ij")
    keep = (j != k) & (next_hop[j] != next_hop[k]) & (next_hop[k] != j)
    interferer = power_gains[j[keep], next_hop[k[keep]]]
    primary = power_gains[j[keep], next_hop[j[keep]]]
    return GainPairs(interferer, primary, exact=True, method="empirical")


def network_gain_laws(network: Network):
    """Empirical interferer law G and primary law H of a sampled network."""
    pairs = network_gain_pairs(network)
    interferer = pairs.interferer if len(pairs) else np.array([0.0])
    return EmpiricalLaw(interferer), EmpiricalLaw(network.primary_power_gains())
