import numpy as np
from scipy.optimize import brentq

from simulation.errors import DegenerateEfficiencyError


class EfficiencyFunction:
    """f(gamma) = (1 - e^-gamma)^M, the packet success approximation for M-bit packets."""

    def __init__(self, packet_bits: int):
        if packet_bits < 1:
            raise ValueError("packet_bits must be >= 1")
        self.packet_bits = packet_bits
        self._target = None

    def __call__(self, sinr):
        return self.value(sinr)

    def value(self, sinr):
        return (-np.expm1(-np.asarray(sinr, dtype=float))) ** self.packet_bits

    def derivative(self, sinr):
        sinr = np.asarray(sinr, dtype=float)
        return self.packet_bits * np.exp(-sinr) * (-np.expm1(-sinr)) ** (self.packet_bits - 1)

    def log_derivative(self, sinr):
        """f'/f = M / (e^gamma - 1), finite where f itself underflows."""
        return self.packet_bits / np.expm1(np.asarray(sinr, dtype=float))

    def log_value(self, sinr):
        return self.packet_bits * np.log(-np.expm1(-np.asarray(sinr, dtype=float)))

    def balance_gap(self, sinr):
        """g(gamma) = f(gamma) - gamma f'(gamma); zero at the target SINR."""
        return self.value(sinr) - sinr * self.derivative(sinr)

    def target_sinr(self) -> float:
        """Unique positive root of f(gamma) = gamma f'(gamma).

        For this f the root solves e^gamma - 1 = M gamma, which is negative between 0 and
        the root and positive after it, so [ln M, upper] brackets it once upper is grown.
        """
        if self._target is not None:
            return self._target
        m = self.packet_bits
        if m < 2:
            raise DegenerateEfficiencyError(f"f = gamma f' has no positive root for M={m}")

        def reduced(gamma):
            return np.expm1(gamma) - m * gamma

        lower = np.log(m)
        upper = 2.0 * lower + 1.0
        while reduced(upper) <= 0:
            upper *= 2.0
        self._target = brentq(reduced, lower, upper, xtol=1e-13, rtol=4 * np.finfo(float).eps, maxiter=200)
        return self._target
