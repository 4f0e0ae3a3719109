import itertools
import math

import numpy as np
import pytest
from conftest import random_attack, random_network

from knightmon import (
    AttackStrategy,
    MonitorSet,
    Network,
    OracleObjective,
    SampledEvaluator,
    brute_force_monitor_selection,
    greedy_monitor_selection,
)
from knightmon.defender import greedy_order
from knightmon.evaluation import ExactEvaluator


def objective(evaluator, thetas, weights=None):
    weights = np.full(len(thetas), 1 / len(thetas)) if weights is None else np.asarray(weights)
    return OracleObjective(list(thetas), weights, [evaluator.outcomes(t) for t in thetas])


def random_objective(rng, n=8, max_edges=16, n_worlds=400, seed=0):
    net = random_network(rng, n, max_edges)
    alpha, beta = (int(x) for x in rng.integers(1, n + 1, size=2))
    ev = SampledEvaluator(net, alpha, beta, n_worlds, master_seed=seed)
    thetas = list({random_attack(rng, net, max_seeds=2) for _ in range(int(rng.integers(1, 4)))})
    return net, objective(ev, thetas, rng.dirichlet(np.ones(len(thetas))))


def test_star_center_monitor():
    n = 5
    net = Network(n, [0] * 4, [1, 2, 3, 4], [1.0] * 4)
    ev = ExactEvaluator(net, alpha=2, beta=n)
    m, val = greedy_monitor_selection(net, objective(ev, [AttackStrategy([0])]), 1)
    # every leaf is reached in round 1 together with the others, giving a
    # cumulative count of |V|; only the seed itself detects in time
    assert m == MonitorSet([0]) and val == 1.0
    ev = ExactEvaluator(net, alpha=2, beta=n)
    for leaf in range(1, n):
        assert ev.rho(AttackStrategy([0]), [leaf]) == 0.0


def test_path_brute_force(path3):
    ev = ExactEvaluator(path3, alpha=3, beta=3)
    obj = objective(ev, [AttackStrategy([0])])
    m, val = brute_force_monitor_selection(path3, obj, 1)
    assert val == 1.0
    assert m in (MonitorSet([0]), MonitorSet([1]))
    assert obj.value([1]) == 1.0 and obj.value([2]) == 0.0


def test_saturation_k_at_least_n():
    rng = np.random.default_rng(0)
    net, obj = random_objective(rng, n=6)
    m, val = greedy_monitor_selection(net, obj, 10)
    assert m == MonitorSet(range(6))
    assert val == pytest.approx(obj.value(range(6)))
    bm, bval = brute_force_monitor_selection(net, obj, 6)
    assert bm == MonitorSet(range(6)) and bval == val


def test_brute_force_cap():
    net = Network(60, [0], [1], [0.5])
    ev = SampledEvaluator(net, 1, 1, 16)
    with pytest.raises(ValueError):
        brute_force_monitor_selection(net, objective(ev, [AttackStrategy([0])]), 30)


def test_greedy_rejects_nonpositive_k(path3):
    ev = ExactEvaluator(path3, 3, 3)
    with pytest.raises(ValueError):
        greedy_monitor_selection(path3, objective(ev, [AttackStrategy([0])]), 0)


def test_modular_instance_greedy_is_optimal():
    # three disjoint 2-node components; each attack lives in one of them
    net = Network(6, [0, 2, 4], [1, 3, 5], [1.0, 1.0, 1.0])
    ev = ExactEvaluator(net, alpha=2, beta=3)
    thetas = [AttackStrategy([0]), AttackStrategy([2]), AttackStrategy([4])]
    obj = objective(ev, thetas, [0.5, 0.3, 0.2])
    for k in (1, 2, 3):
        gm, gv = greedy_monitor_selection(net, obj, k)
        bm, bv = brute_force_monitor_selection(net, obj, k)
        assert gv == pytest.approx(bv) == pytest.approx([0.5, 0.8, 1.0][k - 1])
        assert gm == bm


def test_greedy_chain_properties():
    rng = np.random.default_rng(1)
    for _ in range(30):
        net, obj = random_objective(rng)
        chain = greedy_order(net, obj, net.node_count)
        values = [obj.value([v for v, _ in chain[:i]]) for i in range(len(chain) + 1)]
        assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))
        gains = [g for _, g in chain]
        assert np.allclose(np.diff(values), gains)
        # marginal gain of every fixed node shrinks along the chain
        for v in range(net.node_count):
            marg = [obj.value([u for u, _ in chain[:i]] + [v]) - values[i] for i in range(len(chain))]
            assert all(b <= a + 1e-12 for a, b in zip(marg, marg[1:]))


def test_zero_gain_padding_uses_lowest_ids():
    net = Network(5, [3], [4], [1.0])
    ev = ExactEvaluator(net, alpha=1, beta=1)
    chain = greedy_order(net, objective(ev, [AttackStrategy([3])]), 3)
    assert [v for v, _ in chain] == [0, 1, 2]
    assert all(g == 0 for _, g in chain)


def test_lazy_matches_naive():
    rng = np.random.default_rng(2)
    for i in range(100):
        net, obj = random_objective(rng, n=int(rng.integers(3, 10)), seed=i)
        k = int(rng.integers(1, net.node_count + 1))
        assert greedy_order(net, obj, k, lazy=True) == greedy_order(net, obj, k, lazy=False)


def test_greedy_bound_on_five_nodes():
    rng = np.random.default_rng(3)
    for _ in range(20):
        net = random_network(rng, 5, 10)
        alpha, beta = (int(x) for x in rng.integers(1, 6, size=2))
        ev = SampledEvaluator(net, alpha, beta, 300)
        obj = objective(ev, [AttackStrategy([s]) for s in range(5)])
        for k in (1, 2, 3):
            _, gv = greedy_monitor_selection(net, obj, k)
            best = max(obj.value(c) for c in itertools.combinations(range(5), k))
            assert gv >= (1 - 1 / math.e) * best - 1e-12


def test_objective_validation():
    net = Network(2, [0], [1], [0.5])
    ev = SampledEvaluator(net, 1, 1, 16)
    tab = ev.outcomes(AttackStrategy([0]))
    with pytest.raises(ValueError):
        OracleObjective([AttackStrategy([0])], [0.5], [tab])
    with pytest.raises(ValueError):
        OracleObjective([AttackStrategy([0])], [1.0], [])
