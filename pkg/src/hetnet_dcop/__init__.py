"""User association in multi-tier cellular networks, formulated as a
distributed constraint optimization problem and solved with a Markov-chain
sampler, with a Max-SINR baseline and exact oracles for validation."""

from .assignment import (
    Assignment,
    ViolationReport,
    non_served_users,
    per_user_rate,
    total_rate,
    validate,
    write_assignment_csv,
)
from .baselines import OracleResult, brute_force_solve, max_sinr_solve
from .dcop import (
    Constraint,
    DcopModel,
    Reward,
    VIOLATED,
    Variable,
    build_model,
    candidate_bs,
    constraint_reward,
    model_utility,
    top_candidates,
)
from .mcsolver import (
    Chain,
    GeometricAnnealing,
    RunStats,
    SolverConfig,
    StationaryDistribution,
    check_gap_bound,
    exact_stationary,
    logsumexp,
    solve,
    transition_probability,
    write_trace_csv,
)
from .netmodel import (
    BaseStation,
    ChannelState,
    RadioParams,
    Scenario,
    Tier,
    User,
    compute_channel,
    default_radio,
    draw_fading,
    min_rbs_needed,
    path_loss,
)
from .scenarios import generate_scenario, load_scenario, save_scenario

__version__ = "0.1.0"
