"""Test-count lower bounds and budget recipes for heterogeneous priors.

The counting bound is the prior entropy in bits.  The scaling bound and the
two budget formulas use natural logarithms throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

E = math.e

DEFAULT_DELTA = 2.0

DEFAULT_HEURISTIC_MULTIPLIER = 12.0 * E


@dataclass(frozen=True)
class BoundParams:
    """Knobs for the budget formulas.

    delta is the slack in the covering budget; heuristic_multiplier scales
    the per-day heuristic budget.
    """

    delta: float = DEFAULT_DELTA
    heuristic_multiplier: float = DEFAULT_HEURISTIC_MULTIPLIER

    def __post_init__(self) -> None:
        if self.delta < 0:
            raise ValueError("delta must be nonnegative")
        if self.heuristic_multiplier <= 0:
            raise ValueError("heuristic_multiplier must be positive")


def binary_entropy(p: float) -> float:
    """h2(p) in bits; 0 at both endpoints."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -(p * math.log2(p) + (1.0 - p) * math.log2(1.0 - p))


def entropy_lower_bound(p) -> float:
    """Counting bound: total prior entropy in bits, sum of h2(p_i)."""
    p = np.asarray(p, dtype=np.float64)
    if p.size == 0:
        return 0.0
    if np.any((p < 0.0) | (p > 1.0)):
        raise ValueError("priors must lie in [0, 1]")
    interior = p[(p > 0.0) & (p < 1.0)]
    if interior.size == 0:
        return 0.0
    return float(-np.sum(interior * np.log2(interior)
                         + (1.0 - interior) * np.log2(1.0 - interior)))


def scaling_lower_bound(n: int, p_min: float) -> float:
    """min(n, n * p_min * ln n): the individual-testing count never helps less."""
    if n <= 0:
        raise ValueError("n must be positive")
    if not 0.0 <= p_min <= 1.0:
        raise ValueError("p_min must lie in [0, 1]")
    if n == 1:
        return 1.0
    return float(min(n, n * p_min * math.log(n)))


def cca_budget(n: int, k_bar: float, delta: float = 1.0) -> int:
    """Covering budget ceil(4e(1+delta) * k_bar * ln n)."""
    if n <= 1:
        raise ValueError("n must exceed 1")
    if k_bar <= 0:
        raise ValueError("k_bar must be positive")
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    return math.ceil(4.0 * E * (1.0 + delta) * k_bar * math.log(n))


def heuristic_budget(
    n_t: int,
    p_mean: float,
    multiplier: float = DEFAULT_HEURISTIC_MULTIPLIER,
) -> int:
    """Per-day budget min(ceil(multiplier * n_t * p_mean * ln n_t), n_t).

    Pools of size at most one need no pooling, and a zero mean prior needs
    no tests at all.
    """
    if n_t < 0:
        raise ValueError("pool size must be nonnegative")
    if not 0.0 <= p_mean <= 1.0:
        raise ValueError("p_mean must lie in [0, 1]")
    if multiplier <= 0:
        raise ValueError("multiplier must be positive")
    if n_t <= 1:
        return n_t
    if p_mean == 0.0:
        return 0
    return min(math.ceil(multiplier * n_t * p_mean * math.log(n_t)), n_t)
