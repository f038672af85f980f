import numpy as np
from scipy.optimize import brentq, minimize_scalar

from powergame.protocol import BalancedSolution, GameConfig, ReceiverKind
from simulation import logger
from simulation.asymptotic.large_system import AsymptoticParams, LargeSystem, min_power_mmse
from simulation.errors import InfeasibleSinrError, SolverError
from simulation.game.efficiency import EfficiencyFunction
from simulation.game.nash import NashSolver
from simulation.network.scenario import Scenario
from simulation.network.topology import Network
from simulation.social.objective import BalancedScorer

EXACT = "exact"
PRINTED = "printed"
FINITE = "finite"
LARGE_SYSTEM = "large_system"
SEARCH_FLOOR = 1e-6
SCAN_POINTS = 4001


def _system(params) -> LargeSystem:
    return params if isinstance(params, LargeSystem) else LargeSystem(params)


def mmse_kappa(sinr: float, params) -> float:
    """kappa(gamma) = gamma sigma^2 / (1 - beta gamma (q / (1 + gamma) + (1 - q) zeta(gamma)))."""
    return _system(params).received_power(sinr)


def _correction(system: LargeSystem, sinr: float, form: str) -> float:
    """Factor c(gamma) in the optimality condition f = gamma f' c(gamma)."""
    p = system.params
    beta, q = p.load, p.sharing
    zeta = system.zeta(sinr)
    if form == PRINTED:
        x = beta * q * sinr / (1.0 + sinr) ** 2 + beta * (1.0 - q) * sinr * zeta
        y = 1.0 - beta * q * sinr ** 2 / (1.0 + sinr) ** 2 - beta * (1.0 - q) * sinr * zeta
        return 1.0 - x / y
    if form != EXACT:
        raise ValueError(f"Unsupported optimality form: {form}")
    # stationarity of log f - log kappa, with L(gamma) the interference load
    load = system.interference_load(sinr)
    load_slope = beta * (q / (1.0 + sinr) ** 2 + (1.0 - q) * (zeta + sinr * system.zeta_slope(sinr)))
    return (1.0 - load) / (1.0 - load + sinr * load_slope)


def feasible_upper(system: LargeSystem, limit: float) -> float:
    """Largest SINR up to `limit` with interference load below 1, backed off from the boundary."""
    if system.interference_load(limit) < 1.0:
        return limit
    boundary = brentq(lambda sinr: system.interference_load(sinr) - 1.0, SEARCH_FLOOR, limit, xtol=1e-14, maxiter=500)
    upper = boundary * (1.0 - 1e-9)
    while system.interference_load(upper) >= 1.0:
        upper *= 1.0 - 1e-6
    return upper


def mmse_social_optimum_sinr(params, efficiency: EfficiencyFunction, form: str = EXACT) -> float:
    """Socially optimal balanced MMSE SINR: the root of f(gamma) = gamma f'(gamma) c(gamma) inside the feasible region.

    `form="exact"` uses the stationarity condition of f / kappa including the slope of zeta;
    `form="printed"` uses the approximate factor with the zeta slope dropped.
    """
    system = _system(params)
    target = efficiency.target_sinr()
    if system.interference_load(SEARCH_FLOOR) >= 1.0:
        raise InfeasibleSinrError("Feasible SINR region is empty", SEARCH_FLOOR)
    upper = feasible_upper(system, target)

    def residual(sinr):
        return sinr * float(efficiency.log_derivative(sinr)) * _correction(system, sinr, form) - 1.0

    at_upper = residual(upper)
    if at_upper >= 0:
        if upper == target:
            # no interference correction: the root is the target SINR itself
            return target
        raise SolverError(f"Optimality condition has no root below the feasibility boundary {upper:.6g}")
    if residual(SEARCH_FLOOR) <= 0:
        raise SolverError(f"Optimality condition has no root above {SEARCH_FLOOR:g}")
    optimum = brentq(residual, SEARCH_FLOOR, upper, xtol=1e-13, rtol=4 * np.finfo(float).eps, maxiter=500)
    logger.info("MMSE social optimum", load=system.params.load, sharing=system.params.sharing, sinr=optimum, form=form)
    return optimum


def mmse_social_optimum_by_scan(params, efficiency: EfficiencyFunction, points: int = SCAN_POINTS) -> float:
    """argmax of f(gamma) / kappa(gamma) by a dense scan refined with a bounded scalar search."""
    system = _system(params)
    upper = feasible_upper(system, 1.5 * efficiency.target_sinr())

    def negative_log_ratio(sinr):
        return -(float(efficiency.log_value(sinr)) - np.log(system.received_power(sinr)))

    grid = np.geomspace(1e-2, upper, points)
    values = np.array([negative_log_ratio(sinr) for sinr in grid])
    best = int(np.argmin(values))
    lower, higher = grid[max(best - 1, 0)], grid[min(best + 1, points - 1)]
    result = minimize_scalar(negative_log_ratio, bounds=(lower, higher), method="bounded", options={"xatol": 1e-12, "maxiter": 500})
    return float(result.x)


def mmse_socopt_powers(sinr: float, net: Network, params) -> np.ndarray:
    """p_k = kappa(gamma) / h_k^(m(k))^2."""
    return min_power_mmse(net.primary_power_gains(), sinr, params)


def finite_balanced_powers(sinr: float, scenario: Scenario, cfg: GameConfig):
    """Minimum exact MMSE powers balancing every node at `sinr`, or None when a node hits the cap."""
    outcome = NashSolver(scenario, cfg.copy(update={"receiver": ReceiverKind.MMSE}), target_sinr=sinr).solve()
    if not outcome.converged or outcome.capped:
        logger.warning("Finite MMSE balancing failed", sinr=sinr, converged=outcome.converged, capped=len(outcome.capped))
        return None
    return np.asarray(outcome.powers)


def mmse_social_optimum(weights, scenario: Scenario, cfg: GameConfig, params: AsymptoticParams = None, form: str = EXACT, realization: str = FINITE) -> BalancedSolution:
    """Balanced MMSE social optimum of one scenario, with q and zeta estimated from its own network.

    The SINR comes from the large-system optimality condition. `realization="finite"` reaches it
    with the minimum exact powers of this scenario and falls back to kappa(gamma) / h^2 when those
    would exceed the cap; `realization="large_system"` always uses kappa(gamma) / h^2.
    """
    if realization not in (FINITE, LARGE_SYSTEM):
        raise ValueError(f"Unsupported realization: {realization}")
    if params is None:
        params = AsymptoticParams.from_networks([scenario.network], scenario.processing_gain)
    system = _system(params)
    scorer = BalancedScorer(cfg, weights)
    sinr = mmse_social_optimum_sinr(system, scorer.efficiency, form)
    notes = []
    powers = finite_balanced_powers(sinr, scenario, cfg) if realization == FINITE else None
    if powers is None:
        powers = mmse_socopt_powers(sinr, scenario.network, system)
        if realization == FINITE:
            notes.append("large-system powers")
    above_cap = int(np.sum(powers > cfg.max_power))
    if above_cap:
        logger.warning("Socially optimal MMSE powers exceed the cap", count=above_cap, max_power=cfg.max_power)
        notes.append(f"{above_cap} powers above max_power")
    scorer.log_outcome(ReceiverKind.MMSE.value, sinr, powers)
    return BalancedSolution(
        receiver=ReceiverKind.MMSE,
        feasible=True,
        target_sinr=sinr,
        powers=powers.tolist(),
        sinrs=[sinr] * len(powers),
        objective=scorer.score(sinr, powers),
        diagnostic="; ".join(notes) or None,
    )
