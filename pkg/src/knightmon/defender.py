"""Defender oracle: choose up to k monitors against an attacker mix."""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .diffusion import Outcomes
from .graph import MonitorSet, Network
from .matrix_game import MixedStrategy

BRUTE_FORCE_CAP = 10**6


@dataclass
class OracleObjective:
    """``M -> sum_theta y_theta * rho_theta(M)`` over pre-drawn tables."""

    thetas: list
    weights: np.ndarray
    tables: list

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        if len(self.thetas) != len(self.tables) or len(self.thetas) != self.weights.size:
            raise ValueError("thetas, weights and tables must align")
        if self.weights.size == 0 or self.weights.min() < 0 or abs(self.weights.sum() - 1) > 1e-9:
            raise ValueError("weights must be a probability vector")

    @classmethod
    def from_mix(cls, evaluator, attacker_mix: MixedStrategy) -> "OracleObjective":
        thetas = list(attacker_mix.support)
        return cls(thetas, np.array(attacker_mix.weights), [evaluator.outcomes(t) for t in thetas])

    @classmethod
    def uniform(cls, thetas: list, tables: list[Outcomes]) -> "OracleObjective":
        return cls(list(thetas), np.full(len(thetas), 1.0 / len(thetas)), list(tables))

    def value(self, monitors) -> float:
        mons = list(MonitorSet(monitors))
        return float(sum(y * tab.value(mons) for y, tab in zip(self.weights, self.tables)))


class _Coverage:
    def __init__(self, obj: OracleObjective):
        self.obj = obj
        self.covered = [tab.easy.copy() for tab in obj.tables]

    def gains(self, nodes: np.ndarray) -> np.ndarray:
        total = np.zeros(len(nodes))
        for y, tab, cov in zip(self.obj.weights, self.obj.tables, self.covered):
            if y > 0:
                total += y * tab.gains(cov, nodes)
        return total

    def add(self, v: int):
        for tab, cov in zip(self.obj.tables, self.covered):
            cov |= tab.good[v]


def greedy_order(net: Network, obj: OracleObjective, k: int, lazy: bool = True) -> list[tuple[int, float]]:
    """Greedy chain as ``[(node, marginal_gain), ...]`` of length min(k, |V|).

    Ties go to the lowest node id; once every marginal is zero the chain keeps
    padding with the lowest unused ids.
    """
    n = net.node_count
    steps = min(k, n)
    cover = _Coverage(obj)
    chain = []
    if not lazy:
        remaining = np.arange(n)
        for _ in range(steps):
            g = cover.gains(remaining)
            i = int(np.argmax(g))  # first max == lowest id
            v = int(remaining[i])
            chain.append((v, float(g[i])))
            cover.add(v)
            remaining = np.delete(remaining, i)
        return chain

    # Stale gains are upper bounds because the sampled objective is submodular.
    g0 = cover.gains(np.arange(n))
    heap = [(-float(g), v, 0) for v, g in enumerate(g0)]
    heapq.heapify(heap)
    for step in range(steps):
        while True:
            neg, v, stamp = heapq.heappop(heap)
            if stamp == step:
                chain.append((v, -neg))
                cover.add(v)
                break
            g = float(cover.gains(np.array([v]))[0])
            heapq.heappush(heap, (-g, v, step))
    return chain


def greedy_monitor_selection(net: Network, obj: OracleObjective, k: int, lazy: bool = True):
    """Greedy ``(1 - 1/e)``-approximate maximizer; returns (MonitorSet, value)."""
    if k < 1:
        raise ValueError("k must be positive")
    chain = greedy_order(net, obj, k, lazy=lazy)
    m = MonitorSet(v for v, _ in chain)
    return m, obj.value(m)


def brute_force_monitor_selection(net: Network, obj: OracleObjective, k: int):
    """Exact maximizer over all monitor sets of size min(k, |V|).

    The objective is monotone, so restricting to full-size sets loses nothing.
    Ties go to the lexicographically first set.
    """
    n = net.node_count
    size = min(k, n)
    if math.comb(n, size) > BRUTE_FORCE_CAP:
        raise ValueError(f"brute force refused: C({n}, {size}) > {BRUTE_FORCE_CAP}")
    best, best_val = None, -1.0
    for combo in itertools.combinations(range(n), size):
        val = obj.value(combo)
        if val > best_val:
            best, best_val = combo, val
    return MonitorSet(best), best_val
