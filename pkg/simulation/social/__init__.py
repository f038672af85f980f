from powergame.protocol import ReceiverKind
from simulation.social.objective import BalancedScorer, check_weights, default_weights, weighted_objective
from simulation.social.matched_filter import mf_balanced_powers, mf_power_derivative, mf_social_optimum
from simulation.social.decorrelator import de_social_optimum
from simulation.social.mmse import (
    finite_balanced_powers,
    mmse_kappa,
    mmse_social_optimum,
    mmse_social_optimum_by_scan,
    mmse_social_optimum_sinr,
    mmse_socopt_powers,
)


def social_optimum(kind, weights, scenario, cfg):
    try:
        kind = ReceiverKind(kind)
    except ValueError:
        raise ValueError(f"Unsupported receiver: {kind}")

    solver = {
        ReceiverKind.MF: mf_social_optimum,
        ReceiverKind.DE: de_social_optimum,
        ReceiverKind.MMSE: mmse_social_optimum,
    }[kind]
    return solver(weights, scenario, cfg)
