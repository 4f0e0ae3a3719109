"""Attacker oracle: the attack minimizing the defender's expected utility.

Expected utility is affine in any single edge probability, so only interval
endpoints need to be tried. Candidates are ``(seed set, edge subset,
endpoint per edge)``; with ``alpha == 1`` the optional fast path restricts to
one seed and lower endpoints.
"""

from __future__ import annotations

import heapq
import itertools
import logging
import math
from typing import Iterator

import numpy as np

from .graph import AttackStrategy, GameConfig, MonitorSet, Network, effective_interval
from .matrix_game import MixedStrategy

log = logging.getLogger(__name__)

SINGLE_SEED_BULK_MIN_NODES = 32


def _fast_path(cfg: GameConfig) -> bool:
    return cfg.alpha_one_fast_path and cfg.alpha == 1


def endpoint_options(net: Network, cfg: GameConfig) -> dict[int, list[float]]:
    """Per edge, the endpoint values that actually change its probability."""
    lower_only = _fast_path(cfg)
    opts = {}
    for e in range(net.edge_count):
        lo, hi = effective_interval(net, e)
        p = float(net.base_prob[e])
        choice = [q for q, keep in ((lo, lo < p), (hi, hi > p and not lower_only)) if keep]
        if choice:
            opts[e] = choice
    return opts


def _seed_sizes(net: Network, cfg: GameConfig) -> range:
    return range(1, 2) if _fast_path(cfg) else range(1, min(cfg.c1, net.node_count) + 1)


def candidate_count(net: Network, cfg: GameConfig) -> int:
    seeds = sum(math.comb(net.node_count, s) for s in _seed_sizes(net, cfg))
    # elementary symmetric polynomial of per-edge option counts, degrees 0..c2
    poly = [1] + [0] * cfg.c2
    for opts in endpoint_options(net, cfg).values():
        for j in range(cfg.c2, 0, -1):
            poly[j] += poly[j - 1] * len(opts)
    return seeds * sum(poly)


def _edge_choices(opts: dict[int, list[float]], c2: int):
    eligible = sorted(opts)
    for j in range(min(c2, len(eligible)) + 1):
        for edges in itertools.combinations(eligible, j):
            for values in itertools.product(*(opts[e] for e in edges)):
                yield tuple(zip(edges, values))


def enumerate_candidates(net: Network, cfg: GameConfig) -> Iterator[AttackStrategy]:
    """Every endpoint-restricted attack exactly once, in a fixed order."""
    opts = endpoint_options(net, cfg)
    choices = list(_edge_choices(opts, cfg.c2))
    for size in _seed_sizes(net, cfg):
        for seeds in itertools.combinations(range(net.node_count), size):
            for ov in choices:
                yield AttackStrategy(seeds, ov)


def _support(defender_mix: MixedStrategy):
    return [(list(MonitorSet(m)), float(x)) for m, x in defender_mix]


def _value(table, support) -> float:
    return sum(x * table.value(m) for m, x in support)


def _bulk_values(bulk, support) -> np.ndarray:
    total = np.zeros(len(bulk))
    for m, x in support:
        total += x * bulk.values(m)
    return total


def _single_seed_bulk(net: Network, evaluator):
    if evaluator.exact or net.node_count < SINGLE_SEED_BULK_MIN_NODES:
        return None
    return evaluator.single_seed_outcomes()


def attacker_best_response(net: Network, defender_mix: MixedStrategy, cfg: GameConfig, evaluator):
    """Exhaustive endpoint search; returns (AttackStrategy, defender value).

    Monte Carlo candidates are screened on the first ``screen_samples`` worlds
    and the best ``screen_keep`` re-scored on all of them. Base single-seed
    attacks are scored on all worlds directly from the shared bulk table.
    Ties go to the smallest :meth:`AttackStrategy.sort_key`.
    """
    count = candidate_count(net, cfg)
    if count > cfg.enumeration_cap:
        log.info("attacker oracle: %d candidates > cap %d, using local search", count, cfg.enumeration_cap)
        return local_search_fallback(net, defender_mix, cfg, evaluator)

    support = _support(defender_mix)
    bulk = _single_seed_bulk(net, evaluator)
    bulk_vals = _bulk_values(bulk, support) if bulk is not None else None
    screen = not evaluator.exact and evaluator.n_worlds > cfg.screen_samples

    scored = []
    screened = []
    for theta in enumerate_candidates(net, cfg):
        if bulk_vals is not None and len(theta.seeds) == 1 and not theta.overrides:
            scored.append((float(bulk_vals[theta.seeds[0]]), theta.sort_key(), theta))
        elif screen:
            tab = evaluator.outcomes(theta, cfg.screen_samples, cache=False)
            screened.append((_value(tab, support), theta.sort_key(), theta))
        else:
            scored.append((_value(evaluator.outcomes(theta, cache=False), support), theta.sort_key(), theta))
    for _, key, theta in heapq.nsmallest(cfg.screen_keep, screened, key=lambda t: t[:2]):
        scored.append((_value(evaluator.outcomes(theta, cache=False), support), key, theta))
    val, _, best = min(scored, key=lambda t: t[:2])
    return best, val


def _best_single_seed(net, support, cfg, evaluator):
    bulk = _single_seed_bulk(net, evaluator)
    if bulk is not None:
        vals = _bulk_values(bulk, support)
        s = int(np.argmin(vals))
        return AttackStrategy([s]), float(vals[s])
    best = None
    for s in range(net.node_count):
        theta = AttackStrategy([s])
        cand = (_value(evaluator.outcomes(theta, cache=False), support), theta.sort_key(), theta)
        if best is None or cand[:2] < best[:2]:
            best = cand
    return best[2], best[0]


def local_search_fallback(net: Network, defender_mix: MixedStrategy, cfg: GameConfig, evaluator):
    """Randomized hill climbing used when exhaustive enumeration is too big.

    Moves: swap one seed, add / remove one edge override, or flip an override
    to its other endpoint. Restart 0 starts from the best single-seed attack,
    which is also kept as a final candidate, so the result is never worse
    than the exhaustive single-seed scan.
    """
    support = _support(defender_mix)
    n = net.node_count
    opts = endpoint_options(net, cfg)
    eligible = sorted(opts)
    max_seeds = 1 if _fast_path(cfg) else min(cfg.c1, n)
    n_screen = None if evaluator.exact else min(cfg.screen_samples, evaluator.n_worlds)
    rng = np.random.default_rng([int(cfg.master_seed) & 0xFFFFFFFF, 0xA77AC4])

    def score(theta):
        return _value(evaluator.outcomes(theta, n_screen, cache=False), support)

    def random_start():
        size = int(rng.integers(1, max_seeds + 1))
        seeds = rng.choice(n, size=size, replace=False)
        j = int(rng.integers(0, min(cfg.c2, len(eligible)) + 1))
        edges = rng.choice(eligible, size=j, replace=False) if j else []
        return AttackStrategy(seeds, {int(e): opts[int(e)][int(rng.integers(len(opts[int(e)])))] for e in edges})

    def neighbor(theta):
        seeds = list(theta.seeds)
        ov = theta.override_map
        moves = []
        if len(seeds) < n:
            moves.append("swap")
        if len(ov) < cfg.c2 and len(ov) < len(eligible):
            moves.append("add")
        if ov:
            moves.append("remove")
            if any(len(opts[e]) > 1 for e in ov):
                moves.append("flip")
        if not moves:
            return None
        move = moves[int(rng.integers(len(moves)))]
        if move == "swap":
            out = rng.integers(len(seeds))
            pool = np.setdiff1d(np.arange(n), seeds)
            seeds[out] = int(pool[rng.integers(pool.size)])
        elif move == "add":
            pool = [e for e in eligible if e not in ov]
            e = pool[int(rng.integers(len(pool)))]
            ov[e] = opts[e][int(rng.integers(len(opts[e])))]
        elif move == "remove":
            del ov[sorted(ov)[int(rng.integers(len(ov)))]]
        else:
            pool = [e for e in sorted(ov) if len(opts[e]) > 1]
            e = pool[int(rng.integers(len(pool)))]
            ov[e] = opts[e][1] if ov[e] == opts[e][0] else opts[e][0]
        return AttackStrategy(seeds, ov)

    best_seed, best_seed_val = _best_single_seed(net, support, cfg, evaluator)
    finals = [(best_seed_val, best_seed.sort_key(), best_seed)]
    for r in range(cfg.restarts):
        cur = best_seed if r == 0 else random_start()
        cur_val = score(cur)
        for _ in range(cfg.move_budget):
            cand = neighbor(cur)
            if cand is None:
                break
            val = score(cand)
            if val < cur_val:
                cur, cur_val = cand, val
        full = _value(evaluator.outcomes(cur, cache=False), support)
        finals.append((full, cur.sort_key(), cur))
    val, _, best = min(finals, key=lambda t: t[:2])
    return best, val
