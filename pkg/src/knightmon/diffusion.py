"""Live-edge sampling, outbreak propagation and defender-utility estimation.

Every edge coin is a uniform draw ``u[i, e]`` from a counter-based Philox
stream addressed by ``(master_seed, sample_index, edge_index)``; edge ``e`` is
live in world ``i`` iff ``u[i, e] < p_theta(e)``. All strategies evaluated
under one master seed therefore see common random numbers, and any chunk of
worlds can be generated independently of the others.

Per world the defender's win predicate reduces to two bit columns:

* ``easy``: the outbreak infects fewer than ``alpha`` nodes;
* ``good[v]``: node ``v`` is infected while the end-of-round cumulative count
  is still below ``beta``.

The defender wins world ``i`` with monitors ``M`` iff
``easy[i] or any(good[v][i] for v in M)``. :class:`Outcomes` stores these
columns bit-packed along the world axis.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .graph import AttackStrategy, GameConfig, MonitorSet, Network, apply_strategy

HOEFFDING_DELTA = 0.05
EXACT_EDGE_CAP = 20
CHUNK = 2048  # worlds per work unit; multiple of 8 keeps packed chunks aligned


def hoeffding_half_width(n: int, delta: float = HOEFFDING_DELTA) -> float:
    return math.sqrt(math.log(2.0 / delta) / (2.0 * n))


# --- random streams ------------------------------------------------------

def _philox_key(master_seed: int) -> np.ndarray:
    return np.random.SeedSequence(int(master_seed) & 0xFFFFFFFFFFFFFFFF).generate_state(2, dtype=np.uint64)


def edge_uniforms(master_seed: int, n_edges: int, start: int, stop: int) -> np.ndarray:
    """Uniform draws for worlds ``start..stop-1``; row ``i`` depends only on
    ``(master_seed, i)`` regardless of the chunk it is generated in."""
    if n_edges == 0 or stop <= start:
        return np.zeros((max(stop - start, 0), n_edges))
    blocks = (n_edges + 3) // 4
    stride = 4 * blocks
    counter = np.array([start * blocks, 0, 0, 0], dtype=np.uint64)
    gen = np.random.Generator(np.random.Philox(key=_philox_key(master_seed), counter=counter))
    u = gen.random((stop - start) * stride).reshape(stop - start, stride)
    return u[:, :n_edges]


def live_masks(probs: np.ndarray, master_seed: int, start: int, stop: int) -> np.ndarray:
    return edge_uniforms(master_seed, probs.size, start, stop) < probs


@dataclass(frozen=True)
class LiveEdgeSample:
    sample_index: int
    live: np.ndarray


def draw_sample(net: Network, theta: AttackStrategy, master_seed: int, sample_index: int) -> LiveEdgeSample:
    probs = apply_strategy(net, theta)
    live = live_masks(probs, master_seed, sample_index, sample_index + 1)[0]
    live.setflags(write=False)
    return LiveEdgeSample(sample_index, live)


# --- propagation ---------------------------------------------------------

def infection_rounds(net: Network, seeds: Sequence[int], live: np.ndarray) -> np.ndarray:
    """Batched BFS over live edges. ``live`` is (worlds, edges); returns
    (worlds, nodes) int32 infection rounds with -1 for never infected."""
    live = np.atleast_2d(live)
    w = live.shape[0]
    rounds = np.full((w, net.node_count), -1, dtype=np.int32)
    seeds = np.asarray(seeds, dtype=np.int64)
    rounds[:, seeds] = 0
    frontier = np.zeros((w, net.node_count), dtype=bool)
    frontier[:, seeds] = True
    src, dst = net.src, net.dst
    t = 0
    while True:
        t += 1
        act = frontier[:, src] & live
        rows, cols = np.nonzero(act)
        if rows.size == 0:
            break
        nxt = np.zeros_like(frontier)
        nxt[rows, dst[cols]] = True
        nxt &= rounds < 0
        if not nxt.any():
            break
        rounds[nxt] = t
        frontier = nxt
    return rounds


@dataclass(frozen=True)
class OutbreakTrace:
    infection_round: tuple  # per node: int round or None
    total_infected: int
    cumulative_by_round: tuple


def propagate(net: Network, theta: AttackStrategy, sample: LiveEdgeSample) -> OutbreakTrace:
    r = infection_rounds(net, theta.seeds, sample.live[None, :])[0]
    infected = r[r >= 0]
    counts = np.bincount(infected, minlength=int(infected.max()) + 1)
    return OutbreakTrace(
        infection_round=tuple(int(x) if x >= 0 else None for x in r),
        total_infected=int(infected.size),
        cumulative_by_round=tuple(np.cumsum(counts).tolist()),
    )


def sample_win(trace: OutbreakTrace, monitors: MonitorSet | Iterable[int], alpha: int, beta: int) -> int:
    """1 if the defender wins this world, else 0."""
    if trace.total_infected < alpha:
        return 1
    hit = [trace.infection_round[m] for m in monitors if trace.infection_round[m] is not None]
    if hit and trace.cumulative_by_round[min(hit)] < beta:
        return 1
    return 0


def _late_round(rounds: np.ndarray, beta: int) -> np.ndarray:
    """Per row, the first round whose end-of-round cumulative count reaches
    ``beta`` (one past the last round if it never does)."""
    w = rounds.shape[0]
    tmax = max(int(rounds.max()), 0) + 1
    r = np.where(rounds >= 0, rounds, tmax)  # uninfected binned past the end
    idx = (np.arange(w)[:, None] * (tmax + 1) + r).ravel()
    counts = np.bincount(idx, minlength=w * (tmax + 1)).reshape(w, tmax + 1)[:, :tmax]
    reached = np.cumsum(counts, axis=1) >= beta
    return np.where(reached.any(axis=1), reached.argmax(axis=1), tmax)


def detection_bits(rounds: np.ndarray, alpha: int, beta: int) -> tuple[np.ndarray, np.ndarray]:
    """Unpacked (easy, good) for a (worlds, nodes) rounds array."""
    infected = rounds >= 0
    easy = infected.sum(axis=1) < alpha
    # cumulative counts are nondecreasing, so "count at my round < beta" is
    # "my round < first round reaching beta"
    good = infected & (rounds < _late_round(rounds, beta)[:, None])
    return easy, good


# --- outcome tables ------------------------------------------------------

class Outcomes:
    """Bit-packed per-world (easy, good) table for one attack strategy.

    ``weights`` is None for Monte Carlo worlds (each counts 1/n) or an array of
    world probabilities for exact enumeration.
    """

    __slots__ = ("n_worlds", "easy", "good", "weights")

    def __init__(self, n_worlds: int, easy: np.ndarray, good: np.ndarray, weights=None):
        self.n_worlds = int(n_worlds)
        self.easy = easy      # (bytes,) uint8
        self.good = good      # (nodes, bytes) uint8
        self.weights = weights

    @classmethod
    def from_rounds(cls, rounds: np.ndarray, alpha: int, beta: int, weights=None) -> "Outcomes":
        easy, good = detection_bits(rounds, alpha, beta)
        return cls(rounds.shape[0], np.packbits(easy), np.ascontiguousarray(np.packbits(good, axis=0).T), weights)

    @classmethod
    def concatenate(cls, parts: Sequence["Outcomes"]) -> "Outcomes":
        if len(parts) == 1:
            return parts[0]
        for p in parts[:-1]:
            if p.n_worlds % 8:
                raise ValueError("only the last chunk may have a partial byte")
        weights = None
        if parts[0].weights is not None:
            weights = np.concatenate([p.weights for p in parts])
        return cls(sum(p.n_worlds for p in parts),
                   np.concatenate([p.easy for p in parts]),
                   np.concatenate([p.good for p in parts], axis=1), weights)

    @property
    def node_count(self) -> int:
        return self.good.shape[0]

    def covered(self, monitors: Iterable[int]) -> np.ndarray:
        bits = self.easy.copy()
        for m in monitors:
            bits |= self.good[m]
        return bits

    def wins(self, monitors: Iterable[int]) -> int:
        """Number of Monte Carlo worlds the defender wins."""
        return int(np.bitwise_count(self.covered(monitors)).sum())

    def mass(self, bits: np.ndarray) -> float:
        if self.weights is None:
            return int(np.bitwise_count(bits).sum()) / self.n_worlds
        return float(self.weights @ np.unpackbits(bits, count=self.n_worlds))

    def value(self, monitors: Iterable[int]) -> float:
        return self.mass(self.covered(monitors))

    def gains(self, covered: np.ndarray, nodes: np.ndarray) -> np.ndarray:
        """Marginal mass each node in ``nodes`` adds on top of ``covered``."""
        fresh = self.good[nodes] & ~covered
        if self.weights is None:
            return np.bitwise_count(fresh).sum(axis=1, dtype=np.int64) / self.n_worlds
        return np.unpackbits(fresh, axis=1, count=self.n_worlds) @ self.weights

    def win_vector(self, monitors: Iterable[int]) -> np.ndarray:
        return np.unpackbits(self.covered(monitors), count=self.n_worlds).astype(bool)


def _chunks(start: int, stop: int, size: int = CHUNK):
    return [(a, min(a + size, stop)) for a in range(start, stop, size)]


def _map(fn, items, workers: int):
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def sampled_outcomes(net: Network, theta: AttackStrategy, alpha: int, beta: int,
                     n_samples: int, master_seed: int, workers: int = 1) -> Outcomes:
    probs = apply_strategy(net, theta)

    def work(span):
        live = live_masks(probs, master_seed, *span)
        return Outcomes.from_rounds(infection_rounds(net, theta.seeds, live), alpha, beta)

    return Outcomes.concatenate(_map(work, _chunks(0, n_samples), workers))


def _exact_worlds(probs: np.ndarray):
    uncertain = np.flatnonzero((probs > 0) & (probs < 1))
    m = uncertain.size
    n_worlds = 1 << m
    bits = ((np.arange(n_worlds)[:, None] >> np.arange(m)) & 1).astype(bool)
    live = np.broadcast_to(probs >= 1, (n_worlds, probs.size)).copy()
    live[:, uncertain] = bits
    q = probs[uncertain]
    weights = np.prod(np.where(bits, q, 1.0 - q), axis=1) if m else np.ones(1)
    return live, weights


def _check_exact_cap(net: Network):
    if net.edge_count > EXACT_EDGE_CAP:
        raise ValueError(f"exact enumeration refused: {net.edge_count} edges > cap {EXACT_EDGE_CAP}")


def exact_outcomes(net: Network, theta: AttackStrategy, alpha: int, beta: int) -> Outcomes:
    """Outcomes over every live-edge world with nonzero probability."""
    _check_exact_cap(net)
    live, weights = _exact_worlds(apply_strategy(net, theta))
    return Outcomes.from_rounds(infection_rounds(net, theta.seeds, live), alpha, beta, weights)


@dataclass(frozen=True)
class UtilityEstimate:
    mean: float
    sample_count: int
    half_width: float


def estimate_rho(net: Network, theta: AttackStrategy, monitors: MonitorSet, cfg: GameConfig,
                 workers: int | None = None) -> UtilityEstimate:
    """Monte Carlo estimate of the probability the defender wins."""
    n = cfg.sample_count
    probs = apply_strategy(net, theta)
    mons = list(MonitorSet(monitors).monitors)

    def work(span):
        live = live_masks(probs, cfg.master_seed, *span)
        easy, good = detection_bits(infection_rounds(net, theta.seeds, live), cfg.alpha, cfg.beta)
        return int(np.count_nonzero(easy | good[:, mons].any(axis=1)))

    wins = sum(_map(work, _chunks(0, n), workers or cfg.workers))
    return UtilityEstimate(wins / n, n, hoeffding_half_width(n))


def exact_rho(net: Network, theta: AttackStrategy, monitors: MonitorSet, alpha: int, beta: int) -> float:
    """Exact defender win probability by enumerating all live-edge worlds."""
    return exact_outcomes(net, theta, alpha, beta).value(MonitorSet(monitors))


# --- bulk single-seed tables ---------------------------------------------

SINGLE_SEED_BYTES_CAP = 1 << 29


class SingleSeedTables:
    """Outcomes for every base single-seed attack, stored as shared arrays."""

    def __init__(self, n_worlds: int, easy: np.ndarray, good: np.ndarray):
        self.n_worlds = n_worlds
        self.easy = easy    # (seeds, bytes)
        self.good = good    # (seeds, nodes, bytes)

    def __len__(self):
        return self.easy.shape[0]

    def __getitem__(self, s: int) -> Outcomes:
        return Outcomes(self.n_worlds, self.easy[s], self.good[s])

    def values(self, monitors: Iterable[int]) -> np.ndarray:
        """Defender value of ``monitors`` against each seed."""
        cov = self.easy.copy()
        for m in monitors:
            cov |= self.good[:, m, :]
        return np.bitwise_count(cov).sum(axis=1, dtype=np.int64) / self.n_worlds


def single_seed_outcomes(net: Network, alpha: int, beta: int, n_samples: int, master_seed: int,
                         workers: int = 1) -> SingleSeedTables:
    """Tables for every attack ``<{s}, base probs>`` at once.

    All single-seed attacks without overrides share the same worlds, so each
    world needs one all-sources BFS instead of one BFS per seed.
    """
    n = net.node_count
    nbytes = (n_samples + 7) // 8
    if n * n * nbytes > SINGLE_SEED_BYTES_CAP:
        raise MemoryError("single-seed table too large")
    easy = np.zeros((n, nbytes), dtype=np.uint8)
    good = np.zeros((n, n, nbytes), dtype=np.uint8)
    probs = net.base_prob

    def work(span):
        a, b = span
        live = live_masks(probs, master_seed, a, b)
        e_acc = np.zeros((n, (b - a + 7) // 8), dtype=np.uint8)
        g_acc = np.zeros((n, n, (b - a + 7) // 8), dtype=np.uint8)
        for i in range(b - a):
            mask = live[i]
            adj = csr_matrix((np.ones(int(mask.sum())), (net.src[mask], net.dst[mask])), shape=(n, n))
            d = shortest_path(adj, directed=True, unweighted=True)
            rounds = np.where(np.isfinite(d), d, -1).astype(np.int32)
            e, g = detection_bits(rounds, alpha, beta)
            shift = np.uint8(7 - i % 8)  # packbits order: first world is the high bit
            e_acc[:, i // 8] |= e.view(np.uint8) << shift
            g_acc[:, :, i // 8] |= g.view(np.uint8) << shift
        return a // 8, e_acc, g_acc

    for byte0, pe, pg in _map(work, _chunks(0, n_samples, 64), workers):
        nb = pe.shape[1]
        easy[:, byte0:byte0 + nb] = pe
        good[:, :, byte0:byte0 + nb] = pg
    return SingleSeedTables(n_samples, easy, good)
