"""Two-player zero-sum matrix games solved by a dense tableau simplex.

Rows belong to the maximizing player (defender), columns to the minimizer
(attacker). After shifting the payoffs to be strictly positive the game is
the packing LP ``max 1.w  s.t.  A w <= 1, w >= 0``: the column mix is
``w / sum(w)`` and the row mix comes from the duals of the row constraints,
read off the final tableau, so both mixes share one pivot sequence.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

FEAS_TOL = 1e-9
DUALITY_TOL = 1e-7
MAX_RESTARTS = 3


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class MixedStrategy:
    support: tuple
    weights: tuple

    def __post_init__(self):
        if len(self.support) != len(self.weights):
            raise ValueError("support and weights differ in length")
        if len(set(self.support)) != len(self.support):
            raise ValueError("support ids must be unique")
        w = np.asarray(self.weights, dtype=float)
        if w.size and (w.min() < 0 or abs(w.sum() - 1.0) > 1e-9):
            raise ValueError("weights must be a probability vector")

    @classmethod
    def pure(cls, s) -> "MixedStrategy":
        return cls((s,), (1.0,))

    @classmethod
    def from_vector(cls, ids: Sequence, vec: np.ndarray, drop_below: float = 1e-12) -> "MixedStrategy":
        vec = np.where(np.asarray(vec, dtype=float) > drop_below, vec, 0.0)
        vec = vec / vec.sum()
        keep = np.flatnonzero(vec > 0)
        return cls(tuple(ids[i] for i in keep), tuple(float(vec[i]) for i in keep))

    def as_dict(self) -> dict:
        return dict(zip(self.support, self.weights))

    def vector(self, ids: Sequence) -> np.ndarray:
        d = self.as_dict()
        unknown = set(d) - set(ids)
        if unknown:
            raise KeyError(f"mixed strategy refers to unknown ids {sorted(map(str, unknown))}")
        return np.array([d.get(i, 0.0) for i in ids])

    def __iter__(self):
        return iter(zip(self.support, self.weights))


@dataclass
class PayoffMatrix:
    rows: list
    cols: list
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float).reshape(len(self.rows), len(self.cols))
        if len(set(self.rows)) != len(self.rows) or len(set(self.cols)) != len(self.cols):
            raise ValueError("row/column ids must be duplicate-free")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("payoffs must be finite")

    @classmethod
    def from_array(cls, values) -> "PayoffMatrix":
        values = np.atleast_2d(np.asarray(values, dtype=float))
        return cls(list(range(values.shape[0])), list(range(values.shape[1])), values)


@dataclass(frozen=True)
class GameSolution:
    value: float
    defender_mix: MixedStrategy
    attacker_mix: MixedStrategy


def _simplex_packing(a: np.ndarray):
    """max sum(w) s.t. a @ w <= 1, w >= 0 with ``a > 0``. Returns (w, duals).

    Bland's rule: entering column is the lowest index with positive reduced
    profit; leaving row the minimum ratio, ties to the lowest basic index.
    """
    m, n = a.shape
    tab = np.zeros((m + 1, n + m + 1))
    tab[:m, :n] = a
    tab[:m, n:n + m] = np.eye(m)
    tab[:m, -1] = 1.0
    tab[m, :n] = -1.0  # objective row holds z_j - c_j
    basis = list(range(n, n + m))
    max_pivots = 50 * (n + m) + 1000
    for _ in range(max_pivots):
        entering = np.flatnonzero(tab[m, :-1] < -FEAS_TOL)
        if entering.size == 0:
            break
        j = int(entering[0])
        col = tab[:m, j]
        rows = np.flatnonzero(col > FEAS_TOL)
        if rows.size == 0:
            raise SolverError("unbounded packing LP (payoffs not positive?)")
        ratios = tab[rows, -1] / col[rows]
        best = ratios.min()
        tied = rows[ratios <= best + FEAS_TOL * max(1.0, abs(best))]
        i = int(min(tied, key=lambda r: basis[r]))
        tab[i] /= tab[i, j]
        for r in range(m + 1):
            if r != i and tab[r, j] != 0.0:
                tab[r] -= tab[r, j] * tab[i]
        basis[i] = j
    else:
        raise SolverError("simplex pivot limit reached")
    w = np.zeros(n + m)
    for r, b in enumerate(basis):
        w[b] = tab[r, -1]
    return w[:n], tab[m, n:n + m].copy()


def solve_zero_sum(matrix: PayoffMatrix | np.ndarray) -> GameSolution:
    """Maximin row mix, minimax column mix and the value of the game."""
    if not isinstance(matrix, PayoffMatrix):
        matrix = PayoffMatrix.from_array(matrix)
    a = matrix.values
    if a.size == 0:
        raise ValueError("empty payoff matrix")
    lo, hi = float(a.min()), float(a.max())
    scale = hi - lo if hi > lo else 1.0
    rng = np.random.default_rng(0)
    for attempt in range(MAX_RESTARTS + 1):
        shifted = (a - lo) / scale + 1.0
        if attempt:
            shifted = shifted + rng.uniform(0, 1e-12 * attempt, size=a.shape)
        try:
            w, u = _simplex_packing(shifted)
        except SolverError:
            continue
        if w.sum() <= 0 or u.sum() <= 0:
            continue
        y = np.clip(w, 0, None) / w.sum()
        x = np.clip(u, 0, None) / u.sum()
        primal = float((x @ a).min())
        dual = float((a @ y).max())
        if dual - primal <= DUALITY_TOL:
            value = (1.0 / w.sum() - 1.0) * scale + lo
            value = min(max(value, primal), dual)
            return GameSolution(float(value), MixedStrategy.from_vector(matrix.rows, x),
                                MixedStrategy.from_vector(matrix.cols, y))
    raise SolverError("could not reach a consistent primal/dual solution")


def best_pure_response_value(matrix: PayoffMatrix, mix: MixedStrategy, side: str):
    """Best pure strategy for ``side`` ("defender" or "attacker") within the
    matrix against the opponent's ``mix``. Ties go to the earliest id."""
    a = matrix.values
    if side == "defender":
        payoff = a @ mix.vector(matrix.cols)
        i = int(np.argmax(payoff))
        return matrix.rows[i], float(payoff[i])
    if side == "attacker":
        payoff = mix.vector(matrix.rows) @ a
        j = int(np.argmin(payoff))
        return matrix.cols[j], float(payoff[j])
    raise ValueError(f"unknown side {side!r}")
