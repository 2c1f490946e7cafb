"""Best-arm identification with lil'UCB and baseline algorithms."""

__version__ = "0.1.0"

from .algorithms import (
    AlgorithmSpec,
    ContractViolation,
    ExponentialGapElimination,
    LilStoppingRule,
    LilUCB,
    Nonadaptive,
    SampleStats,
    Sampler,
    SuccessiveElimination,
    UCB1Sampler,
    anytime_recommendation,
    lil_ucb_should_stop,
    ls_should_stop,
    make_sampler,
    median_elimination,
)
from .bandits import (
    ArmModel,
    BanditInstance,
    RewardStream,
    ScenarioSpec,
    best_arm,
    hardness_h1,
    hardness_h3,
    make_scenario,
    sample_arm,
)
from .confidence import (
    InfeasibleError,
    LilParams,
    UcbParams,
    VacuousBoundError,
    Variant,
    lil_radius,
    ls_radius,
    map_confidence_heuristic,
    map_confidence_theory,
    min_exploration_a,
    rho,
    theorem_failure_bound,
    ucb_index,
    validate_params,
)
