"""scikit-learn style wrapper around the double-oracle solver."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .graph import GameConfig, MonitorSet
from .knight import make_evaluator, run_knight
from .validation import check_attacks, check_network, resolve_fractional


class KnightMonitor(BaseEstimator):
    """Robust monitor placement for the (alpha, beta)-monitoring game.

    ``fit`` takes a network (or an edge-list path / text) and computes a mixed
    monitoring strategy; ``predict`` scores attack strategies against it.
    ``alpha`` and ``beta`` may be fractions of the node count.

    Attributes set by ``fit``: ``result_``, ``defender_mix_``,
    ``attacker_mix_``, ``value_``, ``converged_``, ``n_iter_``,
    ``monitor_marginals_`` (probability each node carries a monitor).
    """

    def __init__(self, alpha=1, beta=1, k=1, c1=1, c2=0, sample_count=10_000,
                 epsilon=0.05, master_seed=0, max_iterations=200,
                 defender_oracle="greedy", exact=False, workers=1,
                 default_prob=0.5, interval=0.0, enumeration_cap=10**7):
        self.alpha = alpha
        self.beta = beta
        self.k = k
        self.c1 = c1
        self.c2 = c2
        self.sample_count = sample_count
        self.epsilon = epsilon
        self.master_seed = master_seed
        self.max_iterations = max_iterations
        self.defender_oracle = defender_oracle
        self.exact = exact
        self.workers = workers
        self.default_prob = default_prob
        self.interval = interval
        self.enumeration_cap = enumeration_cap

    def _config(self, net) -> GameConfig:
        return GameConfig(
            alpha=resolve_fractional(self.alpha, net.node_count),
            beta=resolve_fractional(self.beta, net.node_count),
            k=self.k, c1=self.c1, c2=self.c2, sample_count=self.sample_count,
            epsilon=self.epsilon, master_seed=self.master_seed,
            max_iterations=self.max_iterations, workers=self.workers,
            enumeration_cap=self.enumeration_cap,
        ).validate(net)

    def fit(self, X, y=None):
        net = check_network(X, default_prob=self.default_prob, interval=self.interval, seed=self.master_seed)
        cfg = self._config(net)
        self.network_ = net
        self.config_ = cfg
        self.evaluator_ = make_evaluator(net, cfg, exact=self.exact)
        self.result_ = run_knight(net, cfg, evaluator=self.evaluator_, defender_oracle=self.defender_oracle)
        self.defender_mix_ = self.result_.defender_mix
        self.attacker_mix_ = self.result_.attacker_mix
        self.value_ = self.result_.value
        self.converged_ = self.result_.converged
        self.n_iter_ = self.result_.iterations
        marg = np.zeros(net.node_count)
        for m, x in self.defender_mix_:
            marg[list(m)] += x
        self.monitor_marginals_ = marg
        return self

    def predict(self, attacks) -> np.ndarray:
        """Defender win probability of the fitted mix against each attack."""
        check_is_fitted(self, "result_")
        attacks = check_attacks(attacks, self.network_)
        return np.array([sum(x * self.evaluator_.rho(a, m) for m, x in self.defender_mix_) for a in attacks])

    def sample_monitors(self, n_draws=1, random_state=None) -> list[MonitorSet]:
        """Draw monitor deployments from the fitted mixed strategy."""
        check_is_fitted(self, "result_")
        rng = np.random.default_rng(random_state)
        sets = list(self.defender_mix_.support)
        idx = rng.choice(len(sets), size=n_draws, p=np.array(self.defender_mix_.weights))
        return [sets[i] for i in idx]

    def score(self, X=None, y=None) -> float:
        """Worst-case defender utility of the fitted mix (the game value)."""
        check_is_fitted(self, "result_")
        return self.value_
