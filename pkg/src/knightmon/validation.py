"""Input validation helpers shared by the estimator and the CLI."""

from __future__ import annotations

import os
from numbers import Integral, Real
from pathlib import Path

from .graph import AttackStrategy, Network, ValidationError, load_network


def check_network(X, **load_kwargs) -> Network:
    """Accept a :class:`Network`, a path to an edge list, or edge-list text."""
    if isinstance(X, Network):
        return X
    if isinstance(X, (str, os.PathLike)):
        p = Path(X)
        if isinstance(X, os.PathLike) or ("\n" not in str(X) and p.exists()):
            return load_network(p.read_text(encoding="utf-8"), **load_kwargs)
        return load_network(str(X), **load_kwargs)
    raise TypeError(f"expected Network, path or edge-list text, got {type(X).__name__}")


def resolve_fractional(value, n: int) -> int:
    """Fractions in (0, 1] scale with ``n``; integers in [1, n] pass through."""
    if isinstance(value, bool):
        raise ValidationError(f"invalid size {value!r}")
    if isinstance(value, Integral):
        if not 1 <= value <= n:
            raise ValidationError(f"{value} outside [1, {n}]")
        return int(value)
    if isinstance(value, Real):
        if not 0 < value <= 1:
            raise ValidationError(f"fraction {value} outside (0, 1]")
        return max(1, round(value * n))
    raise ValidationError(f"invalid size {value!r}")


def check_attacks(attacks, net: Network) -> list[AttackStrategy]:
    if isinstance(attacks, AttackStrategy):
        attacks = [attacks]
    out = []
    for a in attacks:
        if not isinstance(a, AttackStrategy):
            a = AttackStrategy(a)
        out.append(a.validate(net))
    return out
