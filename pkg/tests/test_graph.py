import os

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from knightmon import (
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
from knightmon.graph import write_id_map

GNUTELLA = os.environ.get("GNUTELLA_PATH", "data/p2p-Gnutella08.txt")


def test_load_constant_prob_and_offsets():
    net = load_network("0 1\n1 2\n", default_prob=0.5, interval=0.2)
    assert net.node_count == 3 and net.edge_count == 2
    for e in range(2):
        assert effective_interval(net, e) == pytest.approx((0.3, 0.7))


def test_self_loop_rejected():
    with pytest.raises(ParseError) as info:
        load_network("0 0\n")
    assert info.value.lineno == 1


@pytest.mark.parametrize("text,line", [
    ("0 1\n1 x\n", 2),
    ("# c\n0 1 0.5 9\n", 2),
    ("0 1 1.5\n", 1),
    ("0 1\n0 1\n", 2),
    ("-1 2\n", 1),
])
def test_parse_errors_carry_line(text, line):
    with pytest.raises(ParseError) as info:
        load_network(text)
    assert info.value.lineno == line


def test_comments_tabs_and_sparse_ids(tmp_path):
    net = load_network("# header\n10\t30\t0.25\n30 7\n\n", default_prob=0.9)
    assert net.node_count == 3
    assert list(net.original_ids) == [7, 10, 30]
    assert net.edges == [(1, 2), (2, 0)]
    assert list(net.base_prob) == [0.25, 0.9]
    write_id_map(net, tmp_path / "ids.csv")
    assert (tmp_path / "ids.csv").read_text().splitlines() == ["original_id,dense_id", "7,0", "10,1", "30,2"]


def test_random_default_prob_is_seeded():
    text = "0 1\n1 2\n2 0\n"
    a = load_network(text, default_prob="random", seed=3)
    b = load_network(text, default_prob="random", seed=3)
    c = load_network(text, default_prob="random", seed=4)
    assert a == b and a != c
    assert ((a.base_prob >= 0) & (a.base_prob <= 1)).all()


def test_offsets_clipped_to_unit_range():
    net = load_network("0 1 0.1\n1 2 0.95\n", interval=(0.3, 0.2))
    assert effective_interval(net, 0) == pytest.approx((0.0, 0.3))
    assert effective_interval(net, 1) == pytest.approx((0.65, 1.0))


@pytest.mark.parametrize("p,lo,hi,expect", [
    (0.5, 0.2, 0.3, (0.3, 0.8)),
    (0.4, 0.0, 0.0, (0.4, 0.4)),
    (1.0, 1.0, 0.0, (0.0, 1.0)),
])
def test_effective_interval_examples(p, lo, hi, expect):
    net = Network(2, [0], [1], [p], [lo], [hi])
    assert effective_interval(net, 0) == pytest.approx(expect)


def test_invalid_network_rejected():
    with pytest.raises(ValidationError):
        Network(2, [0], [1], [0.5], [0.6], [0.0])
    with pytest.raises(ValidationError):
        Network(2, [0], [1], [0.5], [0.0], [0.6])
    with pytest.raises(ValidationError):
        Network(2, [0], [2], [0.5])


def test_network_is_immutable():
    net = Network(2, [0], [1], [0.5])
    with pytest.raises(AttributeError):
        net.node_count = 3
    with pytest.raises(ValueError):
        net.base_prob[0] = 0.1


def test_apply_strategy():
    net = Network(3, [0, 1], [1, 2], [0.5, 0.6], [0.2, 0.1], [0.3, 0.1])
    assert np.array_equal(apply_strategy(net, AttackStrategy([0])), net.base_prob)
    probs = apply_strategy(net, AttackStrategy([0], {0: 0.3}))
    assert list(probs) == [0.3, 0.6]
    assert not probs.flags.writeable
    assert net.base_prob[0] == 0.5
    with pytest.raises(ValidationError):
        apply_strategy(net, AttackStrategy([0], {0: 0.9}))
    with pytest.raises(ValidationError):
        apply_strategy(net, AttackStrategy([0], {5: 0.5}))


def test_attack_canonical_equality():
    a = AttackStrategy([2, 0, 1], {3: 0.2, 1: 0.7})
    b = AttackStrategy([1, 2, 0], [(1, 0.7), (3, 0.2)])
    assert a == b and hash(a) == hash(b)
    assert a.seeds == (0, 1, 2)
    assert MonitorSet([3, 1, 1]) == MonitorSet([1, 3])


def test_attack_budget_validation():
    net = Network(3, [0, 1], [1, 2], [0.5, 0.5], [0.5, 0.5], [0.5, 0.5])
    AttackStrategy([0, 1], {0: 0.0}).validate(net, c1=2, c2=1)
    with pytest.raises(ValidationError):
        AttackStrategy([0, 1]).validate(net, c1=1)
    with pytest.raises(ValidationError):
        AttackStrategy([0], {0: 0.0, 1: 1.0}).validate(net, c2=1)
    with pytest.raises(ValidationError):
        AttackStrategy([]).validate(net)
    with pytest.raises(ValidationError):
        MonitorSet([0, 1]).validate(net, k=1)


def test_config_validation():
    net = Network(3, [0], [1], [0.5])
    GameConfig(alpha=3, beta=1).validate(net)
    with pytest.raises(ValidationError):
        GameConfig(alpha=4, beta=1).validate(net)
    with pytest.raises(ValidationError):
        GameConfig(alpha=1, beta=1, epsilon=0).validate(net)


@st.composite
def edge_lists(draw):
    n = draw(st.integers(2, 8))
    pairs = draw(st.sets(st.tuples(st.integers(0, 40), st.integers(0, 40)).filter(lambda t: t[0] != t[1]),
                         min_size=1, max_size=n * 2))
    probs = draw(st.lists(st.floats(0, 1, allow_nan=False), min_size=len(pairs), max_size=len(pairs)))
    return "".join(f"{u} {v} {q!r}\n" for (u, v), q in zip(sorted(pairs), probs))


@settings(max_examples=60, deadline=None)
@given(edge_lists(), st.floats(0, 1), st.floats(0, 1))
def test_round_trip_and_interval_bounds(text, off_lo, off_hi):
    net = load_network(text, interval=(off_lo, off_hi))
    again = load_network(network_to_text(net), interval=(off_lo, off_hi))
    assert again == net
    for e in range(net.edge_count):
        lo, hi = effective_interval(net, e)
        assert 0 <= lo <= net.base_prob[e] <= hi <= 1


@pytest.mark.skipif(not os.path.exists(GNUTELLA), reason="Gnutella snapshot not available")
def test_gnutella_snapshot_size():
    net = read_network(GNUTELLA)
    assert (net.node_count, net.edge_count) == (8114, 26013)
