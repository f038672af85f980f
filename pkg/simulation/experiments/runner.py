from concurrent.futures import ThreadPoolExecutor
from typing import List

import numpy as np

from powergame.protocol import ExperimentSpec, Mode, ReceiverKind, ResultRow, ResultSet, RunStatus
from simulation import logger
from simulation.game.nash import nash_solve, utilities
from simulation.network.scenario import Scenario, generate_scenario
from simulation.network.topology import generate_network
from simulation.receivers.factory import ReceiverFactory
from simulation.social import social_optimum
from simulation.utils import derive_seed, exception_details

RECEIVER_ORDER = [ReceiverKind.MF, ReceiverKind.DE, ReceiverKind.MMSE]
MODE_ORDER = [Mode.NONCOOPERATIVE, Mode.SOCIAL_OPTIMAL]


def row_sort_key(row: ResultRow):
    return row.N, RECEIVER_ORDER.index(row.receiver), MODE_ORDER.index(row.mode), row.repetition


def topology_seed(master_seed: int, repetition: int) -> int:
    return derive_seed(master_seed, repetition)


def spreading_seed(master_seed: int, repetition: int, processing_gain: int) -> int:
    return derive_seed(master_seed, repetition, processing_gain)


def build_scenario(spec: ExperimentSpec, repetition: int, processing_gain: int, network=None) -> Scenario:
    """Scenario for one repetition and processing gain; the topology depends on the repetition only."""
    cfg = spec.network.copy(update={"seed": topology_seed(spec.master_seed, repetition)})
    if network is None:
        network = generate_network(cfg)
    return generate_scenario(cfg, processing_gain, spreading_seed(spec.master_seed, repetition, processing_gain), network)


def noncooperative_row(scenario: Scenario, kind: ReceiverKind, spec: ExperimentSpec, base: dict) -> ResultRow:
    outcome = nash_solve(scenario, spec.game.copy(update={"receiver": kind}))
    return ResultRow(
        **base,
        mean_utility=float(np.mean(outcome.utilities)),
        target_sinr=outcome.target_sinr,
        capped_fraction=outcome.capped_fraction,
        converged=outcome.converged,
        achieved_sinr=float(np.mean(outcome.sinrs)),
        iterations=outcome.iterations,
    )


def social_optimal_row(scenario: Scenario, kind: ReceiverKind, spec: ExperimentSpec, base: dict) -> ResultRow:
    solution = social_optimum(kind, spec.weights, scenario, spec.game)
    if not solution.feasible:
        return ResultRow(**base, status=RunStatus.FAILED, converged=False, detail=solution.diagnostic)
    powers = np.asarray(solution.powers)
    achieved = ReceiverFactory.create_receiver(kind, scenario).sinrs(powers)
    return ResultRow(
        **base,
        mean_utility=float(np.mean(utilities(powers, solution.sinrs, spec.game))),
        target_sinr=solution.target_sinr,
        capped_fraction=float(np.mean(powers > spec.game.max_power)),
        converged=True,
        achieved_sinr=float(np.mean(achieved)),
        detail=solution.diagnostic,
    )


def run_cell(scenario: Scenario, kind: ReceiverKind, mode: Mode, spec: ExperimentSpec, repetition: int, seed: int) -> ResultRow:
    base = {"N": scenario.processing_gain, "receiver": kind, "mode": mode, "seed": seed, "repetition": repetition}
    if kind == ReceiverKind.DE and scenario.node_count > scenario.processing_gain:
        return ResultRow(**base, status=RunStatus.INAPPLICABLE, detail=f"decorrelator needs K <= N (K={scenario.node_count})")
    try:
        if mode == Mode.NONCOOPERATIVE:
            return noncooperative_row(scenario, kind, spec, base)
        return social_optimal_row(scenario, kind, spec, base)
    except Exception as e:
        logger.error("Experiment run failed", N=base["N"], receiver=kind.value, mode=mode.value, repetition=repetition, error=exception_details(e))
        return ResultRow(**base, status=RunStatus.FAILED, detail=str(e))


def run_repetition(spec: ExperimentSpec, repetition: int) -> List[ResultRow]:
    rows = []
    network = None
    for processing_gain in spec.processing_gains:
        seed = spreading_seed(spec.master_seed, repetition, processing_gain)
        try:
            scenario = build_scenario(spec, repetition, processing_gain, network)
        except Exception as e:
            logger.error("Scenario generation failed", N=processing_gain, repetition=repetition, error=exception_details(e))
            rows.extend(
                ResultRow(N=processing_gain, receiver=kind, mode=mode, seed=seed, repetition=repetition, status=RunStatus.FAILED, detail=str(e))
                for kind in spec.receivers
                for mode in spec.modes
            )
            continue
        network = scenario.network
        for kind in spec.receivers:
            for mode in spec.modes:
                rows.append(run_cell(scenario, kind, mode, spec, repetition, seed))
    logger.info("Repetition finished", repetition=repetition, rows=len(rows), failed=sum(row.status == RunStatus.FAILED for row in rows))
    return rows


def run_experiment(spec: ExperimentSpec) -> ResultSet:
    """Every (N, receiver, mode, repetition) cell of the experiment, sorted deterministically."""
    logger.info("Running experiment", node_count=spec.network.node_count, gains=spec.processing_gains, repetitions=spec.repetitions, master_seed=spec.master_seed)
    repetitions = range(spec.repetitions)
    if spec.workers > 1:
        with ThreadPoolExecutor(max_workers=spec.workers) as executor:
            batches = list(executor.map(lambda repetition: run_repetition(spec, repetition), repetitions))
    else:
        batches = [run_repetition(spec, repetition) for repetition in repetitions]
    rows = sorted((row for batch in batches for row in batch), key=row_sort_key)
    logger.success("Experiment finished", rows=len(rows))
    return ResultSet(spec=spec, rows=rows)
