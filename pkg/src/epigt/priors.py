"""Tester-side belief state and daily prior vectors.

Conditioned on yesterday's per-community new-infection counts, today's
infection events are independent across the susceptible pool with a
probability that is shared by everyone in the same community.  That turns
each day into a static group testing instance with non-identical independent
priors; this module maintains the believed counts and produces the per-day
prior vector.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import ModelParams, community_labels, infection_probability


@dataclass
class PriorVector:
    """Per-individual infection probabilities for one static instance.

    ``p[k]`` is the prior of pool member ``pool[k]``.  An empty pool is a
    valid degenerate instance.
    """

    pool: np.ndarray
    p: np.ndarray

    def __post_init__(self) -> None:
        self.pool = np.asarray(self.pool, dtype=np.int64)
        self.p = np.asarray(self.p, dtype=np.float64)
        if self.pool.shape != self.p.shape:
            raise ValueError("pool and p must have matching shapes")
        if self.p.size and (self.p.min() < 0.0 or self.p.max() > 1.0):
            raise ValueError("priors must lie in [0, 1]")

    @property
    def size(self) -> int:
        return int(self.p.size)

    @property
    def p_min(self) -> float:
        return float(self.p.min()) if self.p.size else 0.0

    @property
    def p_max(self) -> float:
        return float(self.p.max()) if self.p.size else 0.0

    @property
    def p_mean(self) -> float:
        return float(self.p.mean()) if self.p.size else 0.0

    @property
    def k_bar(self) -> float:
        """Expected number of infected pool members."""
        return float(self.p.sum())


@dataclass
class EstimatorState:
    """What the tester believes about the population.

    ``believed_infected`` marks individuals ever decoded positive (they are
    isolated and get prior 0); everyone else non-isolated is treated as
    susceptible and belongs to the daily pool.  ``believed_new_infections``
    holds the per-community counts the next prior computation will use.
    ``resolved`` distinguishes definite decode outcomes from assumed ones.
    """

    params: ModelParams
    believed_infected: np.ndarray
    believed_new_infections: np.ndarray
    priors: np.ndarray
    resolved: np.ndarray

    @classmethod
    def fresh(cls, params: ModelParams) -> "EstimatorState":
        """Day-0 belief: nobody identified, every prior is p_init."""
        return cls(
            params=params,
            believed_infected=np.zeros(params.N, dtype=bool),
            believed_new_infections=np.zeros(params.n_communities, dtype=np.int64),
            priors=np.full(params.N, params.p_init, dtype=np.float64),
            resolved=np.zeros(params.N, dtype=bool),
        )

    def pool_mask(self, isolated: np.ndarray) -> np.ndarray:
        return ~isolated & ~self.believed_infected

    def pool_ids(self, isolated: np.ndarray) -> np.ndarray:
        return np.flatnonzero(self.pool_mask(isolated))


def compute_priors(
    I_counts: np.ndarray, pool: np.ndarray, params: ModelParams
) -> PriorVector:
    """Prior vector for the pool given yesterday's new-infection counts.

    Every pool member in community j receives the same probability
    ``infection_probability(I_counts, j, params)``; non-pool individuals are
    excluded entirely.
    """
    pool = np.asarray(pool, dtype=np.int64)
    if pool.size == 0:
        return PriorVector(pool=pool, p=np.zeros(0, dtype=np.float64))
    ncomm = params.n_communities
    p_by_comm = np.asarray(
        infection_probability(np.asarray(I_counts), np.arange(ncomm), params),
        dtype=np.float64,
    )
    comm = pool // params.C
    return PriorVector(pool=pool, p=p_by_comm[comm])


def update_from_decode(
    est: EstimatorState, decoded: np.ndarray, pool: np.ndarray, resolved: np.ndarray | None = None
) -> tuple[EstimatorState, np.ndarray]:
    """Fold a decode of yesterday's pool into the belief state.

    ``decoded`` marks which pool members were decoded infected.  Returns the
    updated estimator and the ids decoded positive (the isolation set).  The
    believed per-community counts are recomputed from the decoded positives;
    when the decoder errs, the erroneous counts deliberately propagate into
    the next prior computation.
    """
    pool = np.asarray(pool, dtype=np.int64)
    decoded = np.asarray(decoded, dtype=bool)
    if decoded.shape != pool.shape:
        raise ValueError("decoded must have one entry per pool member")
    positives = pool[decoded]
    comm = positives // est.params.C
    counts = np.bincount(comm, minlength=est.params.n_communities).astype(np.int64)

    believed = est.believed_infected.copy()
    believed[positives] = True
    new_resolved = est.resolved.copy()
    if resolved is not None:
        resolved = np.asarray(resolved, dtype=bool)
        new_resolved[pool] = resolved
    updated = EstimatorState(
        params=est.params,
        believed_infected=believed,
        believed_new_infections=counts,
        priors=est.priors.copy(),
        resolved=new_resolved,
    )
    return updated, positives


@dataclass(frozen=True)
class BoundednessReport:
    """Diagnostics for the prior-boundedness properties of one day."""

    ratio: float | None
    all_below_half: bool
    ratio_within_eta: bool | None


def boundedness_report(pv: PriorVector, params: ModelParams) -> BoundednessReport:
    """Ratio p_max/p_min and boundedness flags for one day's priors.

    With an empty pool or p_min = 0 the ratio is undefined and reported as
    None (the day is skipped in ratio statistics), never a crash.
    """
    if pv.size == 0 or pv.p_min == 0.0:
        return BoundednessReport(ratio=None, all_below_half=bool(pv.size == 0 or pv.p_max <= 0.5), ratio_within_eta=None)
    ratio = pv.p_max / pv.p_min
    within = None
    if params.eta is not None:
        within = ratio <= params.eta * (1.0 + 1e-12)
    return BoundednessReport(
        ratio=ratio,
        all_below_half=bool(pv.p_max <= 0.5),
        ratio_within_eta=within,
    )
