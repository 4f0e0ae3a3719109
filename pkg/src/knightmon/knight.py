"""Double-oracle loop for the (alpha, beta)-monitoring game."""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from typing import TextIO

import numpy as np

from .attacker import attacker_best_response
from .defender import (
    OracleObjective,
    brute_force_monitor_selection,
    greedy_monitor_selection,
)
from .evaluation import ExactEvaluator, SampledEvaluator
from .graph import AttackStrategy, GameConfig, MonitorSet, Network
from .matrix_game import MixedStrategy, PayoffMatrix, solve_zero_sum

log = logging.getLogger(__name__)

PROGRESS_HEADER = "iter,U,do_value,ao_value,gap,n_monitor_sets,n_attacks"


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    value: float
    do_value: float
    ao_value: float
    gap: float
    n_monitor_sets: int
    n_attacks: int

    @property
    def do_gain(self) -> float:
        return self.do_value - self.value

    @property
    def ao_gain(self) -> float:
        return self.value - self.ao_value

    def csv_line(self) -> str:
        return (f"{self.iteration},{self.value:.10g},{self.do_value:.10g},{self.ao_value:.10g},"
                f"{self.gap:.10g},{self.n_monitor_sets},{self.n_attacks}")


@dataclass
class EquilibriumResult:
    defender_mix: MixedStrategy
    attacker_mix: MixedStrategy
    value: float
    iterations: int
    gap: float
    converged: bool
    payoff_cache: PayoffMatrix
    history: list = field(default_factory=list)


def convergence_gap(value: float, do_value: float, ao_value: float) -> float:
    """How much either oracle improves on the restricted game value."""
    return max(do_value - value, value - ao_value, 0.0)


DEFENDER_ORACLES = {
    "greedy": lambda net, obj, k: greedy_monitor_selection(net, obj, k, lazy=True),
    "greedy_naive": lambda net, obj, k: greedy_monitor_selection(net, obj, k, lazy=False),
    "brute_force": brute_force_monitor_selection,
}


def initial_attack(net: Network) -> AttackStrategy:
    """Single seed at the highest out-degree node (lowest id on ties)."""
    return AttackStrategy([int(np.argmax(net.out_degree()))])


def initial_monitors(net: Network, cfg: GameConfig, evaluator) -> MonitorSet:
    """Greedy monitors against a uniform mix of all base single-seed attacks."""
    thetas = [AttackStrategy([v]) for v in range(net.node_count)]
    bulk = None if evaluator.exact else evaluator.single_seed_outcomes()
    if bulk is not None:
        tables = [bulk[v] for v in range(net.node_count)]
    else:
        tables = [evaluator.outcomes(t, cache=False) for t in thetas]
    m, _ = greedy_monitor_selection(net, OracleObjective.uniform(thetas, tables), cfg.k)
    return m


def make_evaluator(net: Network, cfg: GameConfig, exact: bool = False):
    if exact:
        return ExactEvaluator.from_config(net, cfg)
    return SampledEvaluator.from_config(net, cfg)


def run_knight(net: Network, cfg: GameConfig, evaluator=None, defender_oracle: str = "greedy",
               progress: TextIO | None = None) -> EquilibriumResult:
    """Approximate maximin monitoring strategy by double oracle.

    Each iteration solves the restricted game, asks the defender oracle for a
    best response to the attacker mix and the attacker oracle for one against
    the defender mix, and stops once neither improves the restricted value by
    more than ``cfg.epsilon``. Payoff entries are computed once per
    (monitor set, attack) pair and never re-sampled.
    """
    cfg.validate(net)
    if evaluator is None:
        evaluator = make_evaluator(net, cfg)
    if not evaluator.exact and cfg.epsilon < 3 * evaluator.half_width:
        warnings.warn(f"epsilon={cfg.epsilon} is below 3x the estimator half-width "
                      f"({evaluator.half_width:.4f}); convergence may chase noise", stacklevel=2)
    oracle = DEFENDER_ORACLES[defender_oracle]

    monitors = [initial_monitors(net, cfg, evaluator)]
    attacks = [initial_attack(net)]
    entries: dict = {}

    def matrix() -> PayoffMatrix:
        vals = np.empty((len(monitors), len(attacks)))
        for j, theta in enumerate(attacks):
            tab = None
            for i, m in enumerate(monitors):
                key = (m, theta)
                if key not in entries:
                    tab = tab or evaluator.outcomes(theta)
                    entries[key] = tab.value(m)
                vals[i, j] = entries[key]
        return PayoffMatrix(list(monitors), list(attacks), vals)

    if progress is not None:
        progress.write(PROGRESS_HEADER + "\n")
    history = []
    converged = False
    gap = float("inf")
    for it in range(1, cfg.max_iterations + 1):
        payoff = matrix()
        sol = solve_zero_sum(payoff)
        obj = OracleObjective.from_mix(evaluator, sol.attacker_mix)
        m_new, do_val = oracle(net, obj, cfg.k)
        theta_new, ao_val = attacker_best_response(net, sol.defender_mix, cfg, evaluator)
        gap = convergence_gap(sol.value, do_val, ao_val)
        rec = IterationRecord(it, sol.value, do_val, ao_val, gap, len(monitors), len(attacks))
        history.append(rec)
        log.debug("knight %s", rec.csv_line())
        if progress is not None:
            progress.write(rec.csv_line() + "\n")
        if gap <= cfg.epsilon:
            converged = True
            break
        grew = False
        if m_new not in monitors:
            monitors.append(m_new)
            grew = True
        if theta_new not in attacks:
            attacks.append(theta_new)
            grew = True
        if not grew:
            log.warning("oracles returned known strategies with gap %.3g > epsilon", gap)
            break
    else:
        log.warning("knight stopped after %d iterations without converging (gap %.3g)", cfg.max_iterations, gap)

    return EquilibriumResult(
        defender_mix=sol.defender_mix,
        attacker_mix=sol.attacker_mix,
        value=sol.value,
        iterations=len(history),
        gap=gap,
        converged=converged,
        payoff_cache=payoff,
        history=history,
    )
