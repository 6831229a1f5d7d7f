"""Multiobjective OFDM power allocation for cognitive radio spectrum sharing.

Closed-form constrained water-filling for the rate-versus-power and
rate-versus-interference tradeoffs, a projected-gradient verification
oracle, spectral-leakage quadrature, Monte Carlo channel sweeps, and a
simulation CLI.
"""

from .channel import (
    ChannelRealization,
    CsiMode,
    CsiSpec,
    PathLossModel,
    compute_gamma,
    draw_realization,
    knowledge_coefficient,
    path_gain,
    path_loss_db,
    pu_interference,
    pu_interference_profile,
)
from .leakage import LeakageMatrix, build_leakage_matrix, leakage_factor
from .montecarlo import (
    SweepResult,
    TrialMetrics,
    build_instance,
    run_sweep,
    run_trial,
    trial_seed,
    violation_rate,
)
from .oracle import (
    OracleResult,
    OracleSettings,
    feasibility_violation,
    gradient_check,
    oracle_solve,
    project_feasible,
)
from .scenario import (
    PuBand,
    ScenarioConfig,
    default_scenario,
    load_scenario,
    save_scenario,
)
from .solver import (
    CaseLabel,
    ProblemInstance,
    SolverError,
    SolverOutcome,
    aci_active_op1,
    both_active_op1,
    cci_active_op1,
    op1_objective,
    op2_objective,
    solve_op1,
    solve_op2,
    unconstrained_op1,
    unconstrained_op2,
)
from .validation import compare_instance, random_instance, run_validation

__version__ = "0.1.0"

__all__ = [
    "CaseLabel",
    "ChannelRealization",
    "CsiMode",
    "CsiSpec",
    "LeakageMatrix",
    "OracleResult",
    "OracleSettings",
    "PathLossModel",
    "ProblemInstance",
    "PuBand",
    "ScenarioConfig",
    "SolverError",
    "SolverOutcome",
    "SweepResult",
    "TrialMetrics",
    "aci_active_op1",
    "both_active_op1",
    "build_instance",
    "build_leakage_matrix",
    "cci_active_op1",
    "compare_instance",
    "compute_gamma",
    "default_scenario",
    "draw_realization",
    "feasibility_violation",
    "gradient_check",
    "knowledge_coefficient",
    "leakage_factor",
    "load_scenario",
    "op1_objective",
    "op2_objective",
    "oracle_solve",
    "path_gain",
    "path_loss_db",
    "project_feasible",
    "pu_interference",
    "pu_interference_profile",
    "random_instance",
    "run_sweep",
    "run_trial",
    "run_validation",
    "save_scenario",
    "solve_op1",
    "solve_op2",
    "trial_seed",
    "unconstrained_op1",
    "unconstrained_op2",
    "violation_rate",
]
