import itertools

import numpy as np
import pytest

from knightmon import AttackStrategy, MonitorSet, Network, enumerate_candidates, load_network

_ACCEPTANCE = []


def random_network(rng, n, max_edges, interval=True, p=None):
    """Random simple digraph on ``n`` nodes with at most ``max_edges`` edges."""
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    m = int(rng.integers(1, min(max_edges, len(pairs)) + 1)) if pairs else 0
    pick = rng.choice(len(pairs), size=m, replace=False) if m else []
    src = [pairs[i][0] for i in pick]
    dst = [pairs[i][1] for i in pick]
    base = rng.uniform(0.05, 0.95, size=m) if p is None else np.full(m, p)
    if interval:
        lo = rng.uniform(0, 1, size=m) * base
        hi = rng.uniform(0, 1, size=m) * (1 - base)
    else:
        lo = hi = np.zeros(m)
    return Network(n, src, dst, base, lo, hi)


def random_attack(rng, net, max_seeds=2, max_overrides=1):
    n_seeds = int(rng.integers(1, min(max_seeds, net.node_count) + 1))
    seeds = rng.choice(net.node_count, size=n_seeds, replace=False)
    ov = {}
    n_ov = int(rng.integers(0, min(max_overrides, net.edge_count) + 1))
    for e in rng.choice(net.edge_count, size=n_ov, replace=False) if n_ov else []:
        lo = net.base_prob[e] - net.interval_lo[e]
        hi = net.base_prob[e] + net.interval_hi[e]
        ov[int(e)] = float(rng.uniform(lo, hi))
    return AttackStrategy(seeds, ov)


def random_monitors(rng, n, max_size=None):
    size = int(rng.integers(0, (max_size or n) + 1))
    return MonitorSet(rng.choice(n, size=size, replace=False))


def power_law_text(n, seed):
    import networkx as nx

    g = nx.DiGraph(nx.scale_free_graph(n, alpha=0.2, beta=0.6, gamma=0.2,
                                        delta_in=0.5, delta_out=0.5, seed=seed))
    g.remove_edges_from(nx.selfloop_edges(g))
    return "".join(f"{u} {v}\n" for u, v in g.edges())


def power_law_network(n, seed, prob_seed=1, interval=0.0):
    return load_network(power_law_text(n, seed), default_prob="random", seed=prob_seed, interval=interval)


def full_game(net, cfg, ev):
    """Every size-k monitor set against every endpoint attack."""
    rows = [MonitorSet(c) for c in itertools.combinations(range(net.node_count), min(cfg.k, net.node_count))]
    cols = list(enumerate_candidates(net, cfg))
    values = np.array([[ev.rho(t, m) for t in cols] for m in rows])
    return rows, cols, values


@pytest.fixture
def path3():
    """a -> b -> c with every edge certain."""
    return Network(3, [0, 1], [1, 2], [1.0, 1.0])


@pytest.fixture
def acceptance():
    def record(number, ok, detail):
        _ACCEPTANCE.append((number, bool(ok), detail))
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, detail in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
