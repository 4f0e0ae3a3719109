"""Parameter sweeps over (alpha, beta, k) with CSV output."""

from __future__ import annotations

import csv
import itertools
import logging
import time
import warnings
from dataclasses import dataclass, field, fields
from pathlib import Path

import yaml

from .graph import GameConfig, Network, read_network
from .knight import run_knight
from .validation import resolve_fractional

log = logging.getLogger(__name__)

RESULTS_HEADER = ["alpha", "beta", "k", "rep", "defender_value", "iterations", "gap", "wall_ms"]
PLOT_HEADER = ["alpha", "beta", "k", "mean_value", "reps", "converged_reps"]


@dataclass
class ExperimentSpec:
    graph_path: str
    alpha: list = field(default_factory=lambda: [1])
    beta: list = field(default_factory=lambda: [1])
    k: list = field(default_factory=lambda: [1])
    c1: int = 1
    c2: int = 0
    sample_count: int = 10_000
    epsilon: float = 0.05
    master_seed: int = 0
    repetitions: int = 5
    max_iterations: int = 200
    output_path: str = "results.csv"
    workers: int = 1
    default_prob: float | str = "random"
    interval: float = 0.0
    defender_oracle: str = "greedy"
    timing: bool = True

    def __post_init__(self):
        for name in ("alpha", "beta", "k"):
            v = getattr(self, name)
            if not isinstance(v, (list, tuple)):
                v = [v]
            setattr(self, name, list(v))
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")

    @classmethod
    def from_mapping(cls, data: dict) -> "ExperimentSpec":
        aliases = {"graph": "graph_path", "samples": "sample_count", "seed": "master_seed",
                   "reps": "repetitions", "max_iters": "max_iterations", "out": "output_path"}
        known = {f.name for f in fields(cls)}
        kwargs = {}
        for key, val in data.items():
            key = aliases.get(key.replace("-", "_"), key.replace("-", "_"))
            if key not in known:
                raise ValueError(f"unknown experiment key {key!r}")
            kwargs[key] = val
        return cls(**kwargs)

    @classmethod
    def from_yaml(cls, path, **overrides) -> "ExperimentSpec":
        data = yaml.safe_load(Path(path).read_text()) or {}
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls.from_mapping(data)

    def cells(self, n: int):
        alphas = [resolve_fractional(a, n) for a in self.alpha]
        betas = [resolve_fractional(b, n) for b in self.beta]
        ks = [int(k) for k in self.k]
        if min(ks) < 1:
            raise ValueError("k must be positive")
        return list(itertools.product(alphas, betas, ks))

    def load_graph(self) -> Network:
        return read_network(self.graph_path, default_prob=self.default_prob,
                            interval=self.interval, seed=self.master_seed)


def _paths(out: Path):
    return out, out.with_name(out.stem + "_plot.csv"), out.with_name(out.stem + "_progress")


def _fmt(x: float) -> str:
    return f"{x:.10g}"


def run_experiment(spec: ExperimentSpec, net: Network | None = None) -> Path:
    """Run every (alpha, beta, k) cell ``repetitions`` times; returns the results path.

    Writes three artifacts next to ``spec.output_path``: the results CSV, a
    ``*_plot.csv`` with one mean value per cell, and a ``*_progress/``
    directory holding each run's per-iteration log. Rep ``r`` uses master
    seed ``master_seed + r``.
    """
    if net is None:
        net = spec.load_graph()
    cells = spec.cells(net.node_count)
    out, plot_path, progress_dir = _paths(Path(spec.output_path))
    out.parent.mkdir(parents=True, exist_ok=True)
    progress_dir.mkdir(exist_ok=True)

    with open(out, "w", newline="") as fh, open(plot_path, "w", newline="") as ph:
        rw, pw = csv.writer(fh, lineterminator="\n"), csv.writer(ph, lineterminator="\n")
        rw.writerow(RESULTS_HEADER)
        pw.writerow(PLOT_HEADER)
        for alpha, beta, k in cells:
            vals, iters, gaps, walls, conv = [], [], [], [], 0
            for rep in range(spec.repetitions):
                cfg = GameConfig(alpha=alpha, beta=beta, k=k, c1=spec.c1, c2=spec.c2,
                                 sample_count=spec.sample_count, epsilon=spec.epsilon,
                                 master_seed=spec.master_seed + rep,
                                 max_iterations=spec.max_iterations, workers=spec.workers)
                t0 = time.perf_counter()
                with open(progress_dir / f"a{alpha}_b{beta}_k{k}_rep{rep}.csv", "w") as prog, \
                        warnings.catch_warnings():
                    warnings.simplefilter("ignore")
                    res = run_knight(net, cfg, defender_oracle=spec.defender_oracle, progress=prog)
                wall = int(round((time.perf_counter() - t0) * 1000)) if spec.timing else 0
                if not res.converged:
                    log.warning("cell alpha=%d beta=%d k=%d rep=%d did not converge (gap %.4g)",
                                alpha, beta, k, rep, res.gap)
                conv += res.converged
                vals.append(res.value)
                iters.append(res.iterations)
                gaps.append(res.gap)
                walls.append(wall)
                rw.writerow([alpha, beta, k, rep, _fmt(res.value), res.iterations, _fmt(res.gap), wall])
                log.info("alpha=%d beta=%d k=%d rep=%d value=%.4f iters=%d", alpha, beta, k, rep,
                         res.value, res.iterations)
            n = spec.repetitions
            mean = sum(vals) / n
            rw.writerow([alpha, beta, k, "mean", _fmt(mean), _fmt(sum(iters) / n),
                         _fmt(sum(gaps) / n), _fmt(sum(walls) / n)])
            pw.writerow([alpha, beta, k, _fmt(mean), n, conv])
    return out
