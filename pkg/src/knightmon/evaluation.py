"""World sets shared by every payoff, oracle and audit within one game.

An evaluator fixes the worlds (Monte Carlo under one master seed, or the
exact enumeration) and hands out :class:`Outcomes` tables per attack
strategy, so every matrix entry and oracle objective is computed on the same
sampled game.
"""

from __future__ import annotations

from typing import Iterable

from .diffusion import (
    Outcomes,
    exact_outcomes,
    hoeffding_half_width,
    sampled_outcomes,
    single_seed_outcomes,
)
from .graph import AttackStrategy, GameConfig, MonitorSet, Network


class SampledEvaluator:
    exact = False

    def __init__(self, net: Network, alpha: int, beta: int, sample_count: int,
                 master_seed: int = 0, workers: int = 1):
        self.net = net
        self.alpha = alpha
        self.beta = beta
        self.n_worlds = sample_count
        self.master_seed = master_seed
        self.workers = workers
        self._cache: dict[AttackStrategy, Outcomes] = {}
        self._single = None

    @classmethod
    def from_config(cls, net: Network, cfg: GameConfig) -> "SampledEvaluator":
        return cls(net, cfg.alpha, cfg.beta, cfg.sample_count, cfg.master_seed, cfg.workers)

    @property
    def half_width(self) -> float:
        return hoeffding_half_width(self.n_worlds)

    def outcomes(self, theta: AttackStrategy, n_worlds: int | None = None, cache: bool = True) -> Outcomes:
        n = self.n_worlds if n_worlds is None else min(n_worlds, self.n_worlds)
        full = n == self.n_worlds
        if full:
            hit = self._cache.get(theta)
            if hit is not None:
                return hit
            if self._single is not None and len(theta.seeds) == 1 and not theta.overrides:
                return self._single[theta.seeds[0]]
        out = sampled_outcomes(self.net, theta, self.alpha, self.beta, n, self.master_seed, self.workers)
        if full and cache:
            self._cache[theta] = out
        return out

    def single_seed_outcomes(self) -> list[Outcomes] | None:
        """Tables for every base single-seed attack, or None if too large."""
        if self._single is None:
            try:
                self._single = single_seed_outcomes(self.net, self.alpha, self.beta, self.n_worlds,
                                                    self.master_seed, self.workers)
            except MemoryError:
                return None
        return self._single

    def rho(self, theta: AttackStrategy, monitors: Iterable[int]) -> float:
        return self.outcomes(theta).value(MonitorSet(monitors))


class ExactEvaluator:
    """Enumerates every live-edge world; only for tiny networks."""

    exact = True
    half_width = 0.0

    def __init__(self, net: Network, alpha: int, beta: int):
        self.net = net
        self.alpha = alpha
        self.beta = beta
        self.n_worlds = None
        self._cache: dict[AttackStrategy, Outcomes] = {}

    @classmethod
    def from_config(cls, net: Network, cfg: GameConfig) -> "ExactEvaluator":
        return cls(net, cfg.alpha, cfg.beta)

    def outcomes(self, theta: AttackStrategy, n_worlds=None, cache: bool = True) -> Outcomes:
        hit = self._cache.get(theta)
        if hit is None:
            hit = exact_outcomes(self.net, theta, self.alpha, self.beta)
            if cache:
                self._cache[theta] = hit
        return hit

    def single_seed_outcomes(self):
        return None

    def rho(self, theta: AttackStrategy, monitors: Iterable[int]) -> float:
        return self.outcomes(theta).value(MonitorSet(monitors))
