from simulation.asymptotic.kernel import effective_interference
from simulation.asymptotic.fixed_point import solve_fixed_point
from simulation.asymptotic.gain_laws import (
    EmpiricalLaw,
    ExponentialLaw,
    GainLaw,
    GainPairs,
    PointMass,
    ZetaEstimate,
    network_gain_laws,
    network_gain_pairs,
    zeta,
)
from simulation.asymptotic.large_system import (
    Achievability,
    AsymptoticParams,
    LargeSystem,
    achievable,
    asymptotic_sinr_de,
    asymptotic_sinr_mf,
    asymptotic_sinr_mmse,
    finite_mmse_sinr_approx,
    min_power_mmse,
    network_sharing,
)
