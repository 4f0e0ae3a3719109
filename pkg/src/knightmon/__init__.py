"""Robust outbreak monitoring on networks via double oracle."""

from .attacker import attacker_best_response, enumerate_candidates, local_search_fallback
from .defender import OracleObjective, brute_force_monitor_selection, greedy_monitor_selection
from .diffusion import (
    LiveEdgeSample,
    OutbreakTrace,
    Outcomes,
    UtilityEstimate,
    draw_sample,
    estimate_rho,
    exact_rho,
    propagate,
    sample_win,
)
from .estimator import KnightMonitor
from .evaluation import ExactEvaluator, SampledEvaluator
from .experiment import ExperimentSpec, run_experiment
from .graph import (
    AttackStrategy,
    GameConfig,
    MonitorSet,
    Network,
    ParseError,
    ValidationError,
    apply_strategy,
    effective_interval,
    load_network,
    network_to_text,
    read_network,
)
from .knight import EquilibriumResult, convergence_gap, run_knight
from .matrix_game import (
    GameSolution,
    MixedStrategy,
    PayoffMatrix,
    SolverError,
    best_pure_response_value,
    solve_zero_sum,
)
from .validation import resolve_fractional

__version__ = "0.1.0"

__all__ = [
    "AttackStrategy",
    "EquilibriumResult",
    "ExactEvaluator",
    "ExperimentSpec",
    "GameConfig",
    "GameSolution",
    "KnightMonitor",
    "LiveEdgeSample",
    "MixedStrategy",
    "MonitorSet",
    "Network",
    "OracleObjective",
    "OutbreakTrace",
    "Outcomes",
    "ParseError",
    "PayoffMatrix",
    "SampledEvaluator",
    "SolverError",
    "UtilityEstimate",
    "ValidationError",
    "apply_strategy",
    "attacker_best_response",
    "best_pure_response_value",
    "brute_force_monitor_selection",
    "convergence_gap",
    "draw_sample",
    "effective_interval",
    "enumerate_candidates",
    "estimate_rho",
    "exact_rho",
    "greedy_monitor_selection",
    "load_network",
    "local_search_fallback",
    "network_to_text",
    "propagate",
    "read_network",
    "resolve_fractional",
    "run_experiment",
    "run_knight",
    "sample_win",
    "solve_zero_sum",
]
