import numpy as np
from scipy.linalg import LinAlgError, lu_factor, lu_solve
from scipy.optimize import brentq

from powergame.protocol import BalancedSolution, GameConfig, ReceiverKind
from simulation import logger
from simulation.errors import InfeasibleSinrError
from simulation.network.scenario import Scenario
from simulation.receivers.matched_filter import MatchedFilterReceiver
from simulation.social.objective import BalancedScorer
from simulation.utils import relative_error

SCAN_START = 1e-3
SCAN_POINTS = 400
BOUNDARY_BISECTIONS = 60
BALANCE_RTOL = 1e-8


def _balance_matrices(scenario: Scenario):
    """B_kj = -h_j^(m(k))^2 rho_kj^2 and D = diag(h_k^(m(k))^2)."""
    net = scenario.network
    # interference[k, j] = h_j^(m(k))^2
    interference = net.power_gains[:, net.next_hop].T
    b = -interference * scenario.spreading.rho ** 2
    d = np.diag(net.primary_power_gains())
    return b, d


def _factor(sinr: float, scenario: Scenario):
    if sinr <= 0:
        raise InfeasibleSinrError("Balanced SINR must be > 0", sinr)
    b, d = _balance_matrices(scenario)
    try:
        # gamma (B + (1/gamma + 1) D) = gamma B + (1 + gamma) D
        lu = lu_factor(sinr * b + (1.0 + sinr) * d, check_finite=True)
    except (LinAlgError, ValueError) as e:
        raise InfeasibleSinrError(f"Balancing matrix is singular at SINR {sinr:.6g}: {e}", sinr)
    if np.any(np.diag(lu[0]) == 0):
        raise InfeasibleSinrError(f"Balancing matrix is singular at SINR {sinr:.6g}", sinr)
    return lu, d


def mf_balanced_powers(sinr: float, scenario: Scenario, validate: bool = True) -> np.ndarray:
    """Powers giving every node matched-filter SINR `sinr`: (B + (1/gamma + 1) D) p = sigma^2 1."""
    lu, _ = _factor(sinr, scenario)
    ones = np.ones(scenario.node_count)
    powers = lu_solve(lu, sinr * scenario.noise_power * ones)
    if not np.all(np.isfinite(powers)) or np.any(powers <= 0):
        raise InfeasibleSinrError(f"SINR {sinr:.6g} needs a nonpositive matched-filter power", sinr)
    if validate:
        achieved = MatchedFilterReceiver(scenario).sinrs(powers)
        worst = float(np.max(relative_error(achieved, sinr)))
        if worst > BALANCE_RTOL:
            raise InfeasibleSinrError(f"Matched-filter balance at SINR {sinr:.6g} is off by {worst:.3e}", sinr)
    return powers


def mf_power_derivative(sinr: float, scenario: Scenario) -> np.ndarray:
    """dp/dgamma = sigma^2 (gamma B + (1 + gamma) D)^-1 D (gamma B + (1 + gamma) D)^-1 1."""
    lu, d = _factor(sinr, scenario)
    inner = lu_solve(lu, np.ones(scenario.node_count))
    return scenario.noise_power * lu_solve(lu, d @ inner)


def _feasible(sinr, scenario) -> bool:
    try:
        mf_balanced_powers(sinr, scenario, validate=False)
        return True
    except InfeasibleSinrError:
        return False


def _feasibility_boundary(feasible: float, infeasible: float, scenario: Scenario) -> float:
    """Largest feasible SINR found by bisection between a feasible and an infeasible one."""
    for _ in range(BOUNDARY_BISECTIONS):
        middle = 0.5 * (feasible + infeasible)
        if _feasible(middle, scenario):
            feasible = middle
        else:
            infeasible = middle
    return feasible


def mf_social_optimum(weights, scenario: Scenario, cfg: GameConfig) -> BalancedSolution:
    """Maximize f(gamma) sum_k alpha_k / p_k(gamma) over the feasible balanced SINRs of the matched filter.

    The log-objective slope is negative past the target SINR, so the scan runs from SCAN_START to
    just beyond it and stops early where balancing becomes infeasible.
    """
    scorer = BalancedScorer(cfg, weights)
    target = scorer.efficiency.target_sinr()

    def slope(sinr):
        powers = mf_balanced_powers(sinr, scenario, validate=False)
        return scorer.log_score_slope(sinr, powers, mf_power_derivative(sinr, scenario))

    if not _feasible(SCAN_START, scenario):
        diagnostic = f"no feasible balanced SINR at or above {SCAN_START:g}"
        logger.warning("Matched-filter social optimum infeasible", node_count=scenario.node_count, processing_gain=scenario.processing_gain, diagnostic=diagnostic)
        return BalancedSolution(receiver=ReceiverKind.MF, feasible=False, diagnostic=diagnostic)

    grid = np.geomspace(SCAN_START, 1.01 * target, SCAN_POINTS)
    rising = grid[0]
    if slope(rising) <= 0:
        diagnostic = f"objective already decreasing at SINR {rising:g}"
        logger.warning("Matched-filter social optimum not bracketed", diagnostic=diagnostic)
        return BalancedSolution(receiver=ReceiverKind.MF, feasible=False, diagnostic=diagnostic)

    falling = None
    for sinr in grid[1:]:
        if not _feasible(sinr, scenario):
            boundary = _feasibility_boundary(rising, sinr, scenario)
            if slope(boundary) < 0:
                falling = boundary
            break
        if slope(sinr) < 0:
            falling = sinr
            break
        rising = sinr

    if falling is None:
        diagnostic = f"objective still increasing at the feasibility boundary near {rising:.6g}"
        logger.warning("Matched-filter social optimum not bracketed", diagnostic=diagnostic)
        return BalancedSolution(receiver=ReceiverKind.MF, feasible=False, diagnostic=diagnostic)

    optimum = brentq(slope, rising, falling, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=500)
    powers = mf_balanced_powers(optimum, scenario)
    scorer.log_outcome(ReceiverKind.MF.value, optimum, powers)
    return BalancedSolution(
        receiver=ReceiverKind.MF,
        feasible=True,
        target_sinr=optimum,
        powers=powers.tolist(),
        sinrs=[optimum] * len(powers),
        objective=scorer.score(optimum, powers),
    )
