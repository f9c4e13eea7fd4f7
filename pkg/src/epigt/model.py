"""Discrete-time SIR stochastic block model with isolation, plus a continuous-time comparator.

The population of ``N`` individuals is partitioned into communities of size
``C`` (individual ``i`` belongs to community ``i // C``).  Each day every
non-isolated infected individual exposes every non-isolated susceptible one:
with probability ``q1`` per intra-community contact and ``q2`` per
inter-community contact.  Infected individuals recover independently with
daily probability ``r``, starting from the day after they are infected.
Isolated individuals are permanently removed from transmission dynamics.

Reporting convention: the recovery draw applies to every currently infected
individual, isolated or not, so that reported infected counts (which include
isolated individuals) decay the way the free ones do.  Transmission, pool
membership and prior computation only ever see non-isolated individuals.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np


class HealthState(enum.IntEnum):
    SUSCEPTIBLE = 0
    INFECTED = 1
    RECOVERED = 2


SUSCEPTIBLE = int(HealthState.SUSCEPTIBLE)
INFECTED = int(HealthState.INFECTED)
RECOVERED = int(HealthState.RECOVERED)


@dataclass(frozen=True)
class ModelParams:
    """Epidemic constants for one experiment.

    N: population size; C: community size (must divide N); p_init: initial
    infection probability; q1/q2: intra/inter-community daily transmission
    probabilities (q2 <= q1); r: daily recovery probability; eta: optional
    prior-boundedness diagnostic constant (>= q1/q2 when both are positive).
    """

    N: int
    C: int
    p_init: float
    q1: float
    q2: float
    r: float = 0.1
    eta: float | None = None

    def __post_init__(self) -> None:
        if self.N <= 0:
            raise ValueError(f"population size must be positive, got N={self.N}")
        if self.C <= 0:
            raise ValueError(f"community size must be positive, got C={self.C}")
        if self.N % self.C != 0:
            raise ValueError(
                f"community size must divide population size, got N={self.N}, C={self.C}"
            )
        for name in ("p_init", "q1", "q2", "r"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
        if self.q2 > self.q1:
            raise ValueError(f"q2 must not exceed q1, got q1={self.q1}, q2={self.q2}")
        if self.eta is not None:
            if self.eta < 1.0:
                raise ValueError(f"eta must be >= 1, got {self.eta}")
            if self.q2 > 0.0 and self.q1 > 0.0 and self.eta < self.q1 / self.q2:
                raise ValueError(
                    f"eta={self.eta} is below q1/q2={self.q1 / self.q2}; "
                    "the prior-ratio bound cannot hold"
                )

    @property
    def n_communities(self) -> int:
        return self.N // self.C

    def community_of(self, i: int | np.ndarray) -> int | np.ndarray:
        return i // self.C


def community_labels(params: ModelParams) -> np.ndarray:
    """Fixed block mapping: individual i -> community i // C."""
    return np.arange(params.N, dtype=np.int64) // params.C


@dataclass
class PopulationState:
    """Ground-truth state of the population on one day.

    ``new_infections_by_community[j]`` counts the infections created by the
    most recent step (the initial infections for a freshly initialized
    state); all of them are non-isolated at birth.
    """

    day: int
    states: np.ndarray
    isolated: np.ndarray
    new_infections_by_community: np.ndarray
    params: ModelParams = field(repr=False)

    def copy(self) -> "PopulationState":
        return PopulationState(
            day=self.day,
            states=self.states.copy(),
            isolated=self.isolated.copy(),
            new_infections_by_community=self.new_infections_by_community.copy(),
            params=self.params,
        )

    @property
    def infected_mask(self) -> np.ndarray:
        return self.states == INFECTED

    @property
    def free_infected_mask(self) -> np.ndarray:
        return (self.states == INFECTED) & ~self.isolated

    def counts(self) -> tuple[int, int, int]:
        s = int(np.count_nonzero(self.states == SUSCEPTIBLE))
        i = int(np.count_nonzero(self.states == INFECTED))
        r = int(np.count_nonzero(self.states == RECOVERED))
        return s, i, r


def init_population(params: ModelParams, rng: np.random.Generator) -> PopulationState:
    """Each individual is independently infected with probability p_init."""
    infected = rng.random(params.N) < params.p_init
    states = np.where(infected, INFECTED, SUSCEPTIBLE).astype(np.int8)
    comm = community_labels(params)
    new_by_comm = np.bincount(comm[infected], minlength=params.n_communities)
    return PopulationState(
        day=0,
        states=states,
        isolated=np.zeros(params.N, dtype=bool),
        new_infections_by_community=new_by_comm.astype(np.int64),
        params=params,
    )


def infection_probability(
    I_counts: np.ndarray, j: int | np.ndarray, params: ModelParams
) -> float | np.ndarray:
    """Probability that a susceptible in community j is infected this day.

    ``I_counts[j']`` is the number of non-isolated infectious individuals in
    community j' at the start of the day.  The closed form is
    1 - (1-q1)^{I_j} * (1-q2)^{sum_{j' != j} I_{j'}}.
    """
    I_counts = np.asarray(I_counts)
    if np.any(I_counts < 0):
        raise ValueError("infection counts must be nonnegative")
    if np.any(I_counts > params.C):
        raise ValueError("a community cannot hold more than C infected individuals")
    total = I_counts.sum()
    if total > params.N:
        raise ValueError("total infections cannot exceed the population size")
    own = I_counts[j]
    other = total - own
    # Compute in log space; log1p keeps q near 0 exact.  A rate of exactly
    # 1 has log-escape -inf, meaning certain infection on any exposure.
    log_q1 = math.log1p(-params.q1) if params.q1 < 1.0 else -math.inf
    log_q2 = math.log1p(-params.q2) if params.q2 < 1.0 else -math.inf
    with np.errstate(invalid="ignore"):
        log_escape = np.where(own > 0, own * log_q1, 0.0) + np.where(
            other > 0, other * log_q2, 0.0
        )
    result = -np.expm1(log_escape)
    if np.ndim(j) == 0:
        return float(result)
    return result


def step(
    state: PopulationState, params: ModelParams, rng: np.random.Generator
) -> tuple[PopulationState, np.ndarray]:
    """Advance one day: recoveries of previously infected, then new infections.

    Infection pressure uses the non-isolated infected counts as of the start
    of the day, so an individual who recovers during this step still exposes
    others.  Newly infected individuals cannot recover within the same step.
    Returns the new state and the per-community counts of new infections.
    """
    comm = community_labels(params)
    free_inf = state.free_infected_mask
    I_counts = np.bincount(comm[free_inf], minlength=params.n_communities)

    states = state.states.copy()

    # Recoveries first; the draw covers isolated infected too (reporting
    # convention, see module docstring) but they contributed nothing to
    # I_counts above and never will again.
    infected_now = states == INFECTED
    recover = infected_now & (rng.random(params.N) < params.r)
    states[recover] = RECOVERED

    # New infections from start-of-day free infected counts.
    p_by_comm = np.asarray(infection_probability(I_counts, np.arange(params.n_communities), params))
    susceptible_free = (state.states == SUSCEPTIBLE) & ~state.isolated
    newly_infected = susceptible_free & (rng.random(params.N) < p_by_comm[comm])
    states[newly_infected] = INFECTED

    new_by_comm = np.bincount(comm[newly_infected], minlength=params.n_communities).astype(np.int64)
    next_state = PopulationState(
        day=state.day + 1,
        states=states,
        isolated=state.isolated.copy(),
        new_infections_by_community=new_by_comm,
        params=params,
    )
    return next_state, new_by_comm


def isolate(state: PopulationState, ids: np.ndarray) -> PopulationState:
    """Permanently remove the given individuals from transmission dynamics."""
    ids = np.asarray(ids, dtype=np.int64)
    if ids.size and (ids.min() < 0 or ids.max() >= state.params.N):
        raise ValueError("isolation ids must index the population")
    isolated = state.isolated.copy()
    isolated[ids] = True
    return PopulationState(
        day=state.day,
        states=state.states.copy(),
        isolated=isolated,
        new_infections_by_community=state.new_infections_by_community.copy(),
        params=state.params,
    )


def gillespie_trajectory(
    params: ModelParams, horizon: int, rng: np.random.Generator
) -> np.ndarray:
    """Continuous-time SIR on the weighted complete block graph, no testing.

    Event-driven simulation with aggregate rates: each susceptible in
    community j is infected at rate q1*I_j + q2*(I_total - I_j) per day and
    each infected recovers at rate r per day.  Returns infected counts
    sampled at integer days 0..horizon-1.
    """
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    ncomm = params.n_communities
    infected0 = rng.random(params.N) < params.p_init
    comm = community_labels(params)
    I = np.bincount(comm[infected0], minlength=ncomm).astype(np.float64)
    S = np.full(ncomm, float(params.C)) - I

    counts = np.zeros(horizon, dtype=np.float64)
    t = 0.0
    next_day = 0
    I_tot = I.sum()
    while next_day < horizon:
        if I_tot == 0:
            counts[next_day:] = 0.0
            break
        infection_rates = S * (params.q1 * I + params.q2 * (I_tot - I))
        lam = infection_rates.sum()
        mu = params.r * I_tot
        total = lam + mu
        dt = rng.exponential(1.0 / total)
        while next_day < horizon and t + dt >= next_day:
            counts[next_day] = I_tot
            next_day += 1
        t += dt
        if next_day >= horizon:
            break
        if rng.random() * total < lam:
            j = rng.choice(ncomm, p=infection_rates / lam)
            S[j] -= 1.0
            I[j] += 1.0
            I_tot += 1.0
        else:
            j = rng.choice(ncomm, p=I / I_tot)
            I[j] -= 1.0
            I_tot -= 1.0
    return counts
