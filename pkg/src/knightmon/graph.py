"""Network, strategy and configuration types plus edge-list ingestion."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

PROB_TOL = 1e-12


class ParseError(ValueError):
    """Malformed edge-list line."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class ValidationError(ValueError):
    """A network, strategy or configuration violates its invariants."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


class Network:
    """Immutable directed graph carrying IC propagation probabilities.

    Each edge ``e`` has a base probability ``p_e`` and an adjustable interval
    stored as nonnegative offsets, so the attacker may set the probability
    anywhere in ``[p_e - lo_e, p_e + hi_e]``.
    """

    __slots__ = (
        "node_count", "src", "dst", "base_prob", "interval_lo", "interval_hi",
        "out_ptr", "out_edges", "in_ptr", "in_edges", "original_ids",
    )

    def __init__(self, node_count, src, dst, base_prob, interval_lo=None,
                 interval_hi=None, original_ids=None):
        node_count = int(node_count)
        src = np.asarray(src, dtype=np.int64).reshape(-1)
        dst = np.asarray(dst, dtype=np.int64).reshape(-1)
        m = src.size
        base_prob = np.asarray(base_prob, dtype=np.float64).reshape(-1)
        lo = np.zeros(m) if interval_lo is None else np.asarray(interval_lo, dtype=np.float64).reshape(-1)
        hi = np.zeros(m) if interval_hi is None else np.asarray(interval_hi, dtype=np.float64).reshape(-1)
        if original_ids is None:
            original_ids = np.arange(node_count, dtype=np.int64)
        original_ids = np.asarray(original_ids, dtype=np.int64)
        _validate_arrays(node_count, src, dst, base_prob, lo, hi, original_ids)

        set_ = object.__setattr__
        set_(self, "node_count", node_count)
        set_(self, "src", _frozen(src))
        set_(self, "dst", _frozen(dst))
        set_(self, "base_prob", _frozen(base_prob))
        set_(self, "interval_lo", _frozen(lo))
        set_(self, "interval_hi", _frozen(hi))
        set_(self, "original_ids", _frozen(original_ids))
        order = np.argsort(src, kind="stable")
        set_(self, "out_edges", _frozen(order))
        set_(self, "out_ptr", _frozen(np.searchsorted(src[order], np.arange(node_count + 1))))
        order = np.argsort(dst, kind="stable")
        set_(self, "in_edges", _frozen(order))
        set_(self, "in_ptr", _frozen(np.searchsorted(dst[order], np.arange(node_count + 1))))
        self._check_adjacency()

    def __setattr__(self, name, value):
        raise AttributeError("Network is immutable")

    @property
    def edge_count(self) -> int:
        return int(self.src.size)

    @property
    def edges(self) -> list[tuple[int, int]]:
        return list(zip(self.src.tolist(), self.dst.tolist()))

    def out_edge_ids(self, v: int) -> np.ndarray:
        return self.out_edges[self.out_ptr[v]:self.out_ptr[v + 1]]

    def in_edge_ids(self, v: int) -> np.ndarray:
        return self.in_edges[self.in_ptr[v]:self.in_ptr[v + 1]]

    def out_degree(self) -> np.ndarray:
        return np.diff(self.out_ptr)

    def edge_id(self, u: int, v: int) -> int:
        for e in self.out_edge_ids(u):
            if self.dst[e] == v:
                return int(e)
        raise KeyError((u, v))

    def _check_adjacency(self):
        seen = np.zeros(self.edge_count, dtype=np.int64)
        for ptr, idx, ends in ((self.out_ptr, self.out_edges, self.src),
                               (self.in_ptr, self.in_edges, self.dst)):
            np.add.at(seen, idx, 1)
            owner = np.repeat(np.arange(self.node_count), np.diff(ptr))
            if not np.array_equal(ends[idx], owner):
                raise ValidationError("adjacency index does not match edge list")
        if not np.all(seen == 2):
            raise ValidationError("adjacency index is not a bijection onto edges")

    def __eq__(self, other):
        if not isinstance(other, Network):
            return NotImplemented
        return (self.node_count == other.node_count
                and all(np.array_equal(getattr(self, a), getattr(other, a))
                        for a in ("src", "dst", "base_prob", "interval_lo",
                                  "interval_hi", "original_ids")))

    __hash__ = None

    def __repr__(self):
        return f"Network(nodes={self.node_count}, edges={self.edge_count})"


def _validate_arrays(n, src, dst, p, lo, hi, original_ids):
    m = src.size
    if n < 1:
        raise ValidationError("node_count must be positive")
    if not (dst.size == p.size == lo.size == hi.size == m):
        raise ValidationError("edge arrays have mismatched lengths")
    if original_ids.size != n:
        raise ValidationError("original_ids must have one entry per node")
    if m == 0:
        return
    bad = np.flatnonzero((src < 0) | (src >= n) | (dst < 0) | (dst >= n))
    if bad.size:
        raise ValidationError(f"edge {bad[0]} has node id outside [0, {n})")
    bad = np.flatnonzero(src == dst)
    if bad.size:
        raise ValidationError(f"edge {bad[0]} is a self-loop on node {src[bad[0]]}")
    keys = src * n + dst
    uniq, counts = np.unique(keys, return_counts=True)
    if np.any(counts > 1):
        k = uniq[np.argmax(counts > 1)]
        raise ValidationError(f"duplicate edge ({k // n}, {k % n})")
    if np.any(~np.isfinite(p)) or np.any(~np.isfinite(lo)) or np.any(~np.isfinite(hi)):
        raise ValidationError("probabilities must be finite")
    bad = np.flatnonzero((lo < 0) | (hi < 0) | (p - lo < -PROB_TOL)
                         | (p + hi > 1 + PROB_TOL) | (p < -PROB_TOL) | (p > 1 + PROB_TOL))
    if bad.size:
        e = bad[0]
        raise ValidationError(
            f"edge {e} ({src[e]}->{dst[e]}): interval [{p[e] - lo[e]}, {p[e] + hi[e]}] "
            "is not inside [0, 1]")


def effective_interval(net: Network, e: int) -> tuple[float, float]:
    """Absolute probability range the attacker may choose on edge ``e``."""
    p = net.base_prob[e]
    lo = min(max(p - net.interval_lo[e], 0.0), 1.0)
    hi = min(max(p + net.interval_hi[e], 0.0), 1.0)
    return float(lo), float(hi)


@dataclass(frozen=True)
class AttackStrategy:
    """Attacker pure strategy: seed nodes plus sparse edge-probability overrides.

    Seeds are kept sorted and overrides sorted by edge id, so strategies built
    in different insertion orders compare (and hash) equal.
    """

    seeds: tuple[int, ...]
    overrides: tuple[tuple[int, float], ...] = ()

    def __init__(self, seeds: Iterable[int], overrides: Mapping[int, float] | Iterable = ()):
        if isinstance(overrides, Mapping):
            items = overrides.items()
        else:
            items = overrides
        ov = {}
        for e, q in items:
            e = int(e)
            if e in ov:
                raise ValidationError(f"edge {e} overridden twice")
            ov[e] = float(q)
        object.__setattr__(self, "seeds", tuple(sorted({int(s) for s in seeds})))
        object.__setattr__(self, "overrides", tuple(sorted(ov.items())))

    @property
    def override_map(self) -> dict[int, float]:
        return dict(self.overrides)

    def sort_key(self):
        # An override sorts before "no further override": among equal-value
        # attacks the one spending its edge budget wins the tie.
        return (self.seeds, self.overrides + ((float("inf"), float("inf")),))

    def validate(self, net: Network, c1: int | None = None, c2: int | None = None) -> "AttackStrategy":
        if not self.seeds:
            raise ValidationError("attack needs at least one seed")
        if c1 is not None and len(self.seeds) > c1:
            raise ValidationError(f"{len(self.seeds)} seeds exceed budget c1={c1}")
        if c2 is not None and len(self.overrides) > c2:
            raise ValidationError(f"{len(self.overrides)} overrides exceed budget c2={c2}")
        if self.seeds[0] < 0 or self.seeds[-1] >= net.node_count:
            raise ValidationError("seed outside node range")
        for e, q in self.overrides:
            if not 0 <= e < net.edge_count:
                raise ValidationError(f"override on nonexistent edge {e}")
            lo, hi = effective_interval(net, e)
            if q < lo - PROB_TOL or q > hi + PROB_TOL:
                raise ValidationError(f"override {q} on edge {e} outside interval [{lo}, {hi}]")
        return self

    def __str__(self):
        s = " ".join(map(str, self.seeds))
        if self.overrides:
            s += " | " + " ".join(f"e{e}={q:.6g}" for e, q in self.overrides)
        return s


@dataclass(frozen=True)
class MonitorSet:
    """Defender pure strategy: a sorted, deduplicated set of monitor nodes."""

    monitors: tuple[int, ...] = ()

    def __init__(self, monitors: Iterable[int] = ()):
        object.__setattr__(self, "monitors", tuple(sorted({int(m) for m in monitors})))

    def __len__(self):
        return len(self.monitors)

    def __iter__(self):
        return iter(self.monitors)

    def __contains__(self, v):
        return v in self.monitors

    def validate(self, net: Network, k: int | None = None) -> "MonitorSet":
        if k is not None and len(self.monitors) > k:
            raise ValidationError(f"{len(self.monitors)} monitors exceed budget k={k}")
        if self.monitors and (self.monitors[0] < 0 or self.monitors[-1] >= net.node_count):
            raise ValidationError("monitor outside node range")
        return self

    def __str__(self):
        return "{" + ",".join(map(str, self.monitors)) + "}"


def apply_strategy(net: Network, theta: AttackStrategy) -> np.ndarray:
    """Read-only per-edge probabilities under ``theta`` (overrides over base)."""
    theta.validate(net)
    probs = net.base_prob.copy()
    for e, q in theta.overrides:
        probs[e] = q
    np.clip(probs, 0.0, 1.0, out=probs)
    probs.setflags(write=False)
    return probs


@dataclass
class GameConfig:
    alpha: int
    beta: int
    k: int = 1
    c1: int = 1
    c2: int = 0
    sample_count: int = 10_000
    epsilon: float = 0.05
    master_seed: int = 0
    max_iterations: int = 200
    # attacker-oracle knobs
    alpha_one_fast_path: bool = True
    enumeration_cap: int = 10**7
    screen_samples: int = 1_000
    screen_keep: int = 100
    restarts: int = 20
    move_budget: int = 500
    workers: int = 1
    extra: dict = field(default_factory=dict, repr=False)

    def validate(self, net: Network | None = None) -> "GameConfig":
        n = net.node_count if net is not None else None
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if v < 1 or (n is not None and v > n):
                raise ValidationError(f"{name}={v} outside [1, {n if n is not None else '|V|'}]")
        for name in ("k", "c1", "sample_count", "max_iterations", "workers",
                     "screen_samples", "screen_keep", "restarts"):
            if getattr(self, name) < 1:
                raise ValidationError(f"{name} must be positive")
        if self.c2 < 0 or self.move_budget < 0:
            raise ValidationError("c2 and move_budget must be nonnegative")
        if not self.epsilon > 0:
            raise ValidationError("epsilon must be positive")
        return self


# --- edge-list ingestion -------------------------------------------------

def _parse_rows(text: str):
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise ParseError(lineno, f"expected 'src dst [prob]', got {raw!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(lineno, f"node ids must be integers: {raw!r}") from None
        if u < 0 or v < 0:
            raise ParseError(lineno, "node ids must be non-negative")
        q = None
        if len(parts) == 3:
            try:
                q = float(parts[2])
            except ValueError:
                raise ParseError(lineno, f"bad probability {parts[2]!r}") from None
            if not 0.0 <= q <= 1.0:
                raise ParseError(lineno, f"probability {q} outside [0, 1]")
        rows.append((lineno, u, v, q))
    return rows


def load_network(edge_list_text: str, default_prob: float | str = 0.5,
                 interval: float | tuple[float, float] = 0.0, seed: int = 0) -> Network:
    """Parse a SNAP-style edge list into a validated :class:`Network`.

    ``default_prob`` is a constant, or ``"random"`` for uniform [0, 1] draws
    seeded by ``seed``; it only applies to rows without a probability column.
    ``interval`` gives constant (lo, hi) offsets, clipped per edge to keep the
    interval inside [0, 1]. Original node ids are compacted to dense ids in
    ascending order.
    """
    rows = _parse_rows(edge_list_text)
    if isinstance(interval, (int, float)):
        off_lo = off_hi = float(interval)
    else:
        off_lo, off_hi = map(float, interval)
    if off_lo < 0 or off_hi < 0:
        raise ValidationError("interval offsets must be nonnegative")

    seen = {}
    for lineno, u, v, _ in rows:
        if u == v:
            raise ParseError(lineno, f"self-loop on node {u}")
        if (u, v) in seen:
            raise ParseError(lineno, f"duplicate edge ({u}, {v}), first at line {seen[u, v]}")
        seen[u, v] = lineno
    if not rows:
        raise ValidationError("edge list contains no edges")

    ids = np.unique(np.array([[u, v] for _, u, v, _ in rows], dtype=np.int64))
    lookup = {int(x): i for i, x in enumerate(ids)}
    src = np.array([lookup[u] for _, u, _, _ in rows], dtype=np.int64)
    dst = np.array([lookup[v] for _, _, v, _ in rows], dtype=np.int64)

    p = np.empty(len(rows))
    given = np.array([q is not None for *_, q in rows])
    p[given] = [q for *_, q in rows if q is not None]
    if default_prob == "random":
        fill = np.random.default_rng(seed).random(len(rows))
        p[~given] = fill[~given]
    else:
        p[~given] = float(default_prob)
    lo = np.minimum(off_lo, p)
    hi = np.minimum(off_hi, 1.0 - p)
    return Network(len(ids), src, dst, p, lo, hi, original_ids=ids)


def read_network(path, **kwargs) -> Network:
    return load_network(Path(path).read_text(encoding="utf-8"), **kwargs)


def network_to_text(net: Network) -> str:
    """Edge-list text (original ids, with prob column) that reloads identically."""
    out = io.StringIO()
    ids = net.original_ids
    for u, v, q in zip(net.src, net.dst, net.base_prob):
        out.write(f"{ids[u]}\t{ids[v]}\t{float(q)!r}\n")
    return out.getvalue()


def write_id_map(net: Network, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["original_id", "dense_id"])
        for dense, orig in enumerate(net.original_ids.tolist()):
            w.writerow([orig, dense])
