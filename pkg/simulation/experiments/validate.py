import time
import traceback
from typing import Callable, List, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field

from powergame.protocol import ExperimentSpec, GameConfig, Mode, NetworkConfig, ReceiverKind, ResultRow, RunStatus
from simulation import logger
from simulation.asymptotic.gain_laws import ExponentialLaw, PointMass
from simulation.asymptotic.kernel import effective_interference
from simulation.asymptotic.large_system import AsymptoticParams, LargeSystem, achievable, asymptotic_sinr_mmse, min_power_mmse
from simulation.errors import InfeasibleSinrError
from simulation.experiments.runner import run_experiment
from simulation.game.efficiency import EfficiencyFunction
from simulation.game.nash import deviation_gains, mmse_maximality_gap, nash_solve
from simulation.network.scenario import Scenario, cellular_scenario, custom_scenario, generate_scenario
from simulation.network.topology import generate_network
from simulation.receivers.decorrelator import DecorrelatorReceiver
from simulation.receivers.linear import sinr_linear
from simulation.receivers.matched_filter import MatchedFilterReceiver
from simulation.receivers.mmse import MMSEReceiver
from simulation.social.matched_filter import mf_balanced_powers, mf_power_derivative, mf_social_optimum
from simulation.social.mmse import mmse_social_optimum_by_scan, mmse_social_optimum_sinr
from simulation.utils import derive_seed, relative_error

REFERENCE_TARGET_SINR = 6.47
REFERENCE_MMSE_OPTIMA = {50: 6.39, 100: 6.43, 200: 6.45, 300: 6.46}
REFERENCE_MF_OPTIMA_RANGES = {300: (4.0, 6.0), 100: (0.5, 3.0)}
REFERENCE_MMSE_UTILITY = 1.417e10  # bits/J, equilibrium at N=100
REFERENCE_UTILITY_FACTOR = 3.0
MF_COLLAPSE_GAINS = (50, 100, 200)
MF_COLLAPSE_CAPPED = 0.9
MF_COLLAPSE_RATIO = 1e-3
MODE_GAP = 0.01
ORDER_SLACK = 1e-9
FINITE_SHARE = 0.95
FINITE_NODE_TOLERANCE = 0.05
FINITE_MEAN_TOLERANCE = 0.03


class Check(BaseModel):
    name: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0
    # reference values this model does not reproduce, reported without failing the check
    deviations: List[str] = Field(default_factory=list)


class ValidationReport(BaseModel):
    checks: List[Check] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def render(self) -> str:
        lines = []
        for check in self.checks:
            lines.append(f"{'PASS' if check.passed else 'FAIL'} {check.name} ({check.seconds:.2f}s) {check.detail}")
            lines.extend(f"  deviation: {deviation}" for deviation in check.deviations)
        deviations = sum(len(c.deviations) for c in self.checks)
        lines.append(f"{sum(c.passed for c in self.checks)}/{len(self.checks)} checks passed, {deviations} documented deviations")
        return "\n".join(lines) + "\n"


class TableClaims(BaseModel):
    failures: List[str] = Field(default_factory=list)
    deviations: List[str] = Field(default_factory=list)
    detail: str = ""


def table_claims(rows: Sequence[ResultRow]) -> TableClaims:
    """Structural claims over completed experiment rows.

    Failures: decorrelator modes differ, MMSE modes differ by 1% or more, or MMSE falls below another
    receiver. Deviations: decorrelator below matched filter, a matched filter that does not collapse
    at N in {50, 100, 200}, and an MMSE equilibrium utility at N=100 off the reference by more than 3x.
    """
    utility = {(row.receiver, row.N, row.mode, row.repetition): row for row in rows if row.status == RunStatus.OK}
    claims = TableClaims()
    scenarios = sorted({(n, mode, repetition) for _, n, mode, repetition in utility}, key=lambda s: (s[0], s[1].value, s[2]))

    mode_gaps = []
    for n, repetition in sorted({(n, repetition) for n, _, repetition in scenarios}):
        for kind in (ReceiverKind.DE, ReceiverKind.MMSE):
            nc = utility.get((kind, n, Mode.NONCOOPERATIVE, repetition))
            so = utility.get((kind, n, Mode.SOCIAL_OPTIMAL, repetition))
            if nc is None or so is None:
                continue
            if kind == ReceiverKind.DE and nc.mean_utility != so.mean_utility:
                claims.failures.append(f"N={n} repetition={repetition}: decorrelator modes differ")
            if kind == ReceiverKind.MMSE:
                gap = float(relative_error(so.mean_utility, nc.mean_utility))
                mode_gaps.append(gap)
                if gap >= MODE_GAP:
                    claims.failures.append(f"N={n} repetition={repetition}: MMSE modes differ by {gap:.2%}")

    below_mf = 0
    for n, mode, repetition in scenarios:
        values = {kind: utility[(kind, n, mode, repetition)].mean_utility for kind in ReceiverKind if (kind, n, mode, repetition) in utility}
        mmse = values.get(ReceiverKind.MMSE)
        for kind in (ReceiverKind.DE, ReceiverKind.MF):
            if mmse is not None and kind in values and mmse < values[kind] * (1.0 - ORDER_SLACK):
                claims.failures.append(f"N={n} mode={mode.value} repetition={repetition}: mmse < {kind.value}")
        if ReceiverKind.DE in values and ReceiverKind.MF in values and values[ReceiverKind.DE] < values[ReceiverKind.MF]:
            below_mf += 1
    if below_mf:
        claims.deviations.append(f"decorrelator below matched filter in {below_mf} of {len(scenarios)} scenarios")

    for n in MF_COLLAPSE_GAINS:
        mf = [row for (kind, gain, mode, _), row in utility.items() if kind == ReceiverKind.MF and gain == n and mode == Mode.NONCOOPERATIVE]
        mmse = [row.mean_utility for (kind, gain, mode, _), row in utility.items() if kind == ReceiverKind.MMSE and gain == n and mode == Mode.NONCOOPERATIVE]
        if not mf or not mmse:
            continue
        capped = float(np.mean([row.capped_fraction for row in mf]))
        ratio = float(np.mean([row.mean_utility for row in mf]) / np.mean(mmse))
        if capped < MF_COLLAPSE_CAPPED or ratio >= MF_COLLAPSE_RATIO:
            claims.deviations.append(f"N={n}: matched-filter equilibrium capped {capped:.0%}, utility {ratio:.2e} of MMSE")

    reference = [row.mean_utility for (kind, gain, mode, _), row in utility.items() if kind == ReceiverKind.MMSE and gain == 100 and mode == Mode.NONCOOPERATIVE]
    if reference:
        factor = float(np.mean(reference)) / REFERENCE_MMSE_UTILITY
        if not 1.0 / REFERENCE_UTILITY_FACTOR <= factor <= REFERENCE_UTILITY_FACTOR:
            claims.deviations.append(f"N=100: MMSE equilibrium utility {np.mean(reference):.3e} bits/J is {factor:.3g}x the reference {REFERENCE_MMSE_UTILITY:.4g}")

    worst = max(mode_gaps) if mode_gaps else 0.0
    claims.detail = f"{len(scenarios)} scenarios, largest MMSE mode gap {worst:.3%}"
    return claims


class OracleSuite:
    """Property and oracle checks over small randomized scenarios; `full` adds the 100-node reference runs."""

    def __init__(self, seed: int = 0, instances: int = 100, full: bool = False, scenario: Scenario = None, table_repetitions: int = 10):
        self.seed = seed
        self.table_repetitions = table_repetitions
        self.instances = instances
        self.full = full
        self.scenario = scenario
        self.cfg = GameConfig()
        self.efficiency = EfficiencyFunction(self.cfg.packet_bits)

    def rng(self, *counters) -> np.random.Generator:
        return np.random.default_rng(derive_seed(self.seed, *counters))

    def small_scenario(self, index: int, node_count: int = 8, processing_gain: int = 32) -> Scenario:
        if self.scenario is not None:
            return self.scenario
        cfg = NetworkConfig(node_count=node_count, seed=derive_seed(self.seed, 1000, index))
        return generate_scenario(cfg, processing_gain, derive_seed(self.seed, 2000, index))

    def cellular(self, index: int, node_count: int, processing_gain: int) -> Scenario:
        rng = self.rng(3000, index)
        return cellular_scenario(rng.uniform(0.5, 2.0, node_count), processing_gain, noise_power=1.0, seed=derive_seed(self.seed, 4000, index))

    def run(self) -> ValidationReport:
        checks = [
            ("target_sinr", self.check_target_sinr),
            ("kernel_monotone", self.check_kernel),
            ("mmse_dominance", self.check_mmse_dominance),
            ("de_invariance", self.check_de_invariance),
            ("own_power_slope", self.check_own_power_slope),
            ("linear_filter_agreement", self.check_linear_agreement),
            ("nash_deviation", self.check_nash_deviation),
            ("mmse_maximality", self.check_mmse_maximality),
            ("mf_balance_derivative", self.check_mf_derivative),
            ("mmse_optimum_consistency", self.check_mmse_optimum),
            ("large_system_power_loop", self.check_power_loop),
        ]
        if self.full:
            checks += [
                ("finite_power_loop", self.check_finite_power_loop),
                ("mmse_social_optima", self.check_reference_mmse_optima),
                ("mf_social_optima", self.check_reference_mf_optima),
                ("table1", self.check_table),
            ]
        report = ValidationReport()
        for name, check in checks:
            report.checks.append(self._run_check(name, check))
        if report.passed:
            logger.success("Validation passed", checks=len(report.checks))
        else:
            logger.error("Validation failed", failed=[c.name for c in report.checks if not c.passed])
        return report

    @staticmethod
    def _run_check(name: str, check: Callable[[], Union[str, Tuple[str, List[str]]]]) -> Check:
        start = time.time()
        try:
            outcome = check()
            detail, deviations = outcome if isinstance(outcome, tuple) else (outcome, [])
            result = Check(name=name, passed=True, detail=detail or "", deviations=deviations)
            for deviation in deviations:
                logger.warning("Reference value not reproduced", check=name, deviation=deviation)
        except AssertionError as e:
            result = Check(name=name, passed=False, detail=str(e))
        except Exception as e:
            logger.error("Validation check crashed", check=name, error=traceback.format_exc())
            result = Check(name=name, passed=False, detail=f"{e.__class__.__name__}: {e}")
        result.seconds = time.time() - start
        logger.info("Validation check", check=name, passed=result.passed, detail=result.detail, seconds=result.seconds)
        return result

    def check_target_sinr(self):
        target = self.efficiency.target_sinr()
        assert abs(target - REFERENCE_TARGET_SINR) <= 0.01, f"target SINR {target:.6f}"
        assert abs(float(self.efficiency.balance_gap(target))) <= 1e-12, "f - gamma f' is not zero at the target"
        return f"gamma*={target:.6f}"

    def check_kernel(self):
        rng = self.rng(1)
        a0, a, b, c = rng.uniform(1e-3, 10.0, size=(4, self.instances))
        a0, a = np.minimum(a0, a), np.maximum(a0, a)
        low, high = effective_interference(a0, b, c), effective_interference(a, b, c)
        assert np.all(low <= high), "I(., b, c) decreased"
        assert np.all(high <= a * (1 + 1e-12)) and np.all(high <= b / c * (1 + 1e-12)), "I exceeds min(a, b/c)"
        return f"{self.instances} triples"

    def check_mmse_dominance(self):
        worst = 0.0
        for index in range(self.instances):
            scenario = self.small_scenario(index)
            rng = self.rng(2, index)
            powers = rng.uniform(0.1, 1.0, scenario.node_count)
            mmse = MMSEReceiver(scenario).sinrs(powers)
            mf = MatchedFilterReceiver(scenario).sinrs(powers)
            de = DecorrelatorReceiver(scenario).sinrs(powers)
            assert np.all(mmse >= mf * (1 - 1e-9)), f"instance {index}: MMSE below MF"
            assert np.all(mmse >= de * (1 - 1e-9)), f"instance {index}: MMSE below DE"
            k = int(rng.integers(scenario.node_count))
            filters = rng.standard_normal((1000, scenario.processing_gain))
            best = max(sinr_linear(f, k, powers, scenario.network, scenario.spreading) for f in filters)
            worst = max(worst, best / mmse[k])
        assert worst <= 1 + 1e-9, f"random filter beat MMSE by {worst - 1:.3e}"
        return f"best random/MMSE ratio {worst:.6f}"

    def check_de_invariance(self):
        for index in range(self.instances):
            scenario = self.small_scenario(index)
            rng = self.rng(3, index)
            receiver = DecorrelatorReceiver(scenario)
            powers = rng.uniform(0.1, 1.0, scenario.node_count)
            k = int(rng.integers(scenario.node_count))
            before = receiver.sinr(k, powers)
            perturbed = rng.uniform(0.1, 1.0, scenario.node_count)
            perturbed[k] = powers[k]
            assert receiver.sinr(k, perturbed) == before, f"instance {index}: DE SINR depends on interferer powers"
        return f"{self.instances} instances"

    def check_own_power_slope(self):
        worst = 0.0
        for index in range(self.instances):
            scenario = self.small_scenario(index)
            rng = self.rng(4, index)
            powers = rng.uniform(0.1, 1.0, scenario.node_count)
            k = int(rng.integers(scenario.node_count))
            receiver = MMSEReceiver(scenario)
            step = 1e-6 * powers[k]
            up, down = powers.copy(), powers.copy()
            up[k] += step
            down[k] -= step
            derivative = (receiver.sinr(k, up) - receiver.sinr(k, down)) / (2 * step)
            worst = max(worst, float(relative_error(derivative, receiver.sinr(k, powers) / powers[k])))
        assert worst <= 1e-5, f"d gamma / d p off by {worst:.3e}"
        return f"worst relative error {worst:.3e}"

    def check_linear_agreement(self):
        worst = 0.0
        for index in range(self.instances):
            scenario = self.small_scenario(index)
            powers = self.rng(5, index).uniform(0.1, 1.0, scenario.node_count)
            for receiver in (MatchedFilterReceiver(scenario), DecorrelatorReceiver(scenario), MMSEReceiver(scenario)):
                for k in range(scenario.node_count):
                    generic = sinr_linear(receiver.filter(k, powers), k, powers, scenario.network, scenario.spreading)
                    worst = max(worst, float(relative_error(generic, receiver.sinr(k, powers))))
        assert worst <= 1e-6, f"receiver SINR differs from the generic linear SINR by {worst:.3e}"
        return f"worst relative error {worst:.3e}"

    def check_nash_deviation(self):
        worst = 0.0
        scenarios = min(self.instances, 20)
        for index in range(scenarios):
            scenario = self.small_scenario(index, node_count=10, processing_gain=32)
            for kind in ReceiverKind:
                outcome = nash_solve(scenario, self.cfg.copy(update={"receiver": kind}))
                assert outcome.converged, f"instance {index}: {kind.value} did not converge"
                worst = max(worst, float(np.max(deviation_gains(scenario, outcome, self.cfg))))
        assert worst <= 1e-9, f"unilateral deviation gains {worst:.3e}"
        return f"{scenarios} scenarios, worst gain {worst:.3e}"

    def check_mmse_maximality(self):
        scenario = self.small_scenario(0)
        outcome = nash_solve(scenario, self.cfg)
        gap = mmse_maximality_gap(scenario, outcome, rng=self.rng(6))
        assert gap <= 1 + 1e-9, f"alternative filter beats MMSE at equilibrium by {gap - 1:.3e}"
        return f"gap {gap:.6f}"

    def check_mf_derivative(self):
        worst = 0.0
        for index in range(10):
            scenario = self.cellular(index, node_count=10, processing_gain=32)
            sinr = 1.0
            powers = mf_balanced_powers(sinr, scenario)
            achieved = MatchedFilterReceiver(scenario).sinrs(powers)
            assert np.max(relative_error(achieved, sinr)) <= 1e-8, f"instance {index}: MF balance broken"
            step = 1e-5 * sinr
            finite = (mf_balanced_powers(sinr + step, scenario) - mf_balanced_powers(sinr - step, scenario)) / (2 * step)
            worst = max(worst, float(np.max(relative_error(mf_power_derivative(sinr, scenario), finite))))
        assert worst <= 1e-4, f"dp/dgamma off by {worst:.3e}"
        return f"worst relative error {worst:.3e}"

    def check_mmse_optimum(self):
        laws = ExponentialLaw(1.0), ExponentialLaw(1.0)
        params = AsymptoticParams(load=0.5, sharing=0.3, noise_power=1.0, interferer_law=laws[0], primary_law=laws[1])
        system = LargeSystem(params)
        root = mmse_social_optimum_sinr(system, self.efficiency)
        scanned = mmse_social_optimum_by_scan(system, self.efficiency)
        assert abs(root - scanned) <= 1e-6, f"root {root:.9f} vs scan {scanned:.9f}"
        light = AsymptoticParams(load=1e-7, sharing=1.0, noise_power=1.0, interferer_law=PointMass(1.0), primary_law=PointMass(1.0))
        limit = mmse_social_optimum_sinr(light, self.efficiency)
        assert abs(limit - self.efficiency.target_sinr()) <= 1e-3, f"light-load optimum {limit:.6f}"
        return f"root {root:.6f}, scan {scanned:.6f}"

    def check_power_loop(self):
        law = ExponentialLaw(1.0)
        achievable_cases = [(0.5, 1.0, 1.0), (1.0, 0.5, 2.0), (0.25, 0.0, 4.0), (2.0, 0.2, 0.25), (0.8, 0.7, 3.0)]
        worst = 0.0
        for load, sharing, sinr in achievable_cases:
            system = LargeSystem(AsymptoticParams(load=load, sharing=sharing, noise_power=1.0, interferer_law=law, primary_law=law, seed=self.seed))
            assert achievable(sinr, system).achievable, f"beta={load} q={sharing} gamma={sinr} should be achievable"
            kappa = system.received_power(sinr)
            fixed = asymptotic_sinr_mmse(kappa / 1.0, 1.0, system, lambda h: kappa / h)
            worst = max(worst, float(relative_error(fixed, sinr)))
        for load, sharing, sinr in [(2.0, 1.0, 1.5), (3.0, 0.5, 10.0), (4.0, 0.5, 3.0)]:
            system = LargeSystem(AsymptoticParams(load=load, sharing=sharing, noise_power=1.0, interferer_law=law, primary_law=law))
            try:
                min_power_mmse(1.0, sinr, system)
            except InfeasibleSinrError:
                continue
            raise AssertionError(f"beta={load} q={sharing} gamma={sinr} should be refused")
        assert worst <= 0.01, f"fixed point misses the requested SINR by {worst:.3e}"
        return f"worst relative error {worst:.3e}"


    def relay_scenario(self, index: int, node_count: int, processing_gain: int, hubs: int) -> Scenario:
        # nodes below `hubs` relay to the access point; every other node sends to hub k mod hubs
        rng = self.rng(8000, index)
        nodes = np.arange(node_count)
        next_hop = np.where(nodes < hubs, node_count, nodes % hubs)
        power_gains = rng.uniform(0.01, 0.2, (node_count, node_count + 1))
        power_gains[nodes, next_hop] = rng.uniform(0.5, 2.0, node_count)
        return custom_scenario(power_gains, next_hop, processing_gain, noise_power=1.0, seed=derive_seed(self.seed, 9000, index))

    def check_finite_power_loop(self):
        processing_gain = 200
        cellular = [(0.5, 1.0), (1.0, 2.0), (0.5, 4.0), (1.0, 0.5), (0.75, 3.0)]
        relayed = [(0.5, 2, 2.0), (1.0, 5, 3.0), (0.5, 10, 4.0)]
        scenarios = [(self.cellular(100 + i, int(load * processing_gain), processing_gain), sinr) for i, (load, sinr) in enumerate(cellular)]
        scenarios += [
            (self.relay_scenario(i, int(load * processing_gain), processing_gain, hubs), sinr) for i, (load, hubs, sinr) in enumerate(relayed)
        ]
        deviations, worst = [], 0.0
        for scenario, sinr in scenarios:
            params = AsymptoticParams.from_networks([scenario.network], processing_gain)
            label = f"K={scenario.node_count} q={params.sharing:.3f} gamma={sinr}"
            assert achievable(sinr, params).achievable, f"{label} should be achievable"
            powers = min_power_mmse(scenario.network.primary_power_gains(), sinr, params)
            exact = MMSEReceiver(scenario).sinrs(powers)
            mean_error = float(relative_error(np.mean(exact), sinr))
            worst = max(worst, mean_error)
            assert mean_error <= FINITE_MEAN_TOLERANCE, f"{label}: mean SINR {np.mean(exact):.4f} misses by {mean_error:.2%}"
            share = float(np.mean(relative_error(exact, sinr) <= FINITE_NODE_TOLERANCE))
            if share < FINITE_SHARE:
                deviations.append(f"{label}: {share:.0%} of nodes within {FINITE_NODE_TOLERANCE:.0%} at N={processing_gain}")
        return f"{len(scenarios)} triples at N={processing_gain}, worst mean error {worst:.2%}", deviations

    def check_reference_mmse_optima(self):
        networks = [generate_network(NetworkConfig(seed=derive_seed(self.seed, 5000, index))) for index in range(20)]
        optima = {}
        for processing_gain, expected in REFERENCE_MMSE_OPTIMA.items():
            params = AsymptoticParams.from_networks(networks, processing_gain)
            optima[processing_gain] = mmse_social_optimum_sinr(params, self.efficiency)
            assert abs(optima[processing_gain] - expected) <= 0.05, f"N={processing_gain}: {optima[processing_gain]:.4f} vs {expected}"
        values = [optima[n] for n in sorted(optima)]
        assert all(a < b for a, b in zip(values, values[1:])), "MMSE optimum not increasing in N"
        return ", ".join(f"N={n}: {v:.4f}" for n, v in sorted(optima.items()))

    def check_reference_mf_optima(self):
        network = generate_network(NetworkConfig(seed=derive_seed(self.seed, 6000)))
        means = {}
        for processing_gain in sorted(REFERENCE_MF_OPTIMA_RANGES):
            values = []
            for draw in range(10):
                scenario = generate_scenario(network_config(network), processing_gain, derive_seed(self.seed, 7000, processing_gain, draw), network)
                solution = mf_social_optimum(None, scenario, self.cfg)
                if solution.feasible:
                    values.append(solution.target_sinr)
            assert values, f"N={processing_gain}: no feasible draw"
            means[processing_gain] = float(np.mean(values))
        low, high = REFERENCE_MF_OPTIMA_RANGES[300]
        assert low <= means[300] <= high, f"N=300: {means[300]:.4f} outside [{low}, {high}]"
        assert means[100] < means[300], f"MF optimum not increasing in N: {means[100]:.4f} >= {means[300]:.4f}"
        deviations = []
        low, high = REFERENCE_MF_OPTIMA_RANGES[100]
        if not low <= means[100] <= high:
            deviations.append(f"N=100: matched-filter optimum {means[100]:.4f} outside [{low}, {high}]")
        return ", ".join(f"N={n}: {v:.4f}" for n, v in sorted(means.items())), deviations

    def table_spec(self) -> ExperimentSpec:
        return ExperimentSpec(repetitions=self.table_repetitions, master_seed=self.seed, plot=False)

    def check_table(self):
        results = run_experiment(self.table_spec())
        claims = table_claims(results.rows)
        assert not claims.failures, "; ".join(claims.failures[:5])
        return claims.detail, claims.deviations


def network_config(network) -> NetworkConfig:
    return NetworkConfig(node_count=network.node_count, noise_power=network.noise_power)


def validate(seed: int = 0, instances: int = 100, full: bool = False, scenario: Scenario = None) -> ValidationReport:
    return OracleSuite(seed=seed, instances=instances, full=full, scenario=scenario).run()
