import numpy as np
from scipy.optimize import fixed_point

from simulation import logger
from simulation.errors import FixedPointError

DAMPING = 0.5


def solve_fixed_point(mapping, x0: float, damping: float = DAMPING, rtol: float = 1e-8, max_iterations: int = 2000) -> float:
    """Scalar fixed point x = mapping(x) by damped iteration, with Aitken-accelerated iteration as fallback."""
    trace = []
    x = float(x0)
    for _ in range(max_iterations):
        mapped = float(mapping(x))
        trace.append(mapped)
        if not np.isfinite(mapped):
            raise FixedPointError("Fixed-point map left the finite range", trace)
        if abs(mapped - x) <= rtol * max(abs(mapped), np.finfo(float).tiny):
            return mapped
        x = (1.0 - damping) * x + damping * mapped

    logger.warning("Damped iteration stalled, switching to Aitken acceleration", start=x, iterations=max_iterations)
    try:
        return float(fixed_point(mapping, x, xtol=rtol, maxiter=max_iterations, method="del2"))
    except RuntimeError:
        raise FixedPointError("Fixed-point iteration did not converge", trace)
